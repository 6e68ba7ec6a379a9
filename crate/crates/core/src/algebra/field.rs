use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::AlgebraError;

/// The coefficient field of a polynomial or circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    /// Exact rationals (characteristic zero).
    Rational,
    /// Residues modulo a prime.
    Prime(u64),
}

impl Field {
    pub fn characteristic(self) -> u64 {
        match self {
            Field::Rational => 0,
            Field::Prime(p) => p,
        }
    }

    pub fn zero(self) -> FieldElem {
        self.from_i64(0)
    }

    pub fn one(self) -> FieldElem {
        self.from_i64(1)
    }

    pub fn from_i64(self, v: i64) -> FieldElem {
        self.from_bigint(&BigInt::from(v))
    }

    pub fn from_u64(self, v: u64) -> FieldElem {
        self.from_bigint(&BigInt::from(v))
    }

    pub fn from_bigint(self, v: &BigInt) -> FieldElem {
        match self {
            Field::Rational => FieldElem::Rational(BigRational::from_integer(v.clone())),
            Field::Prime(p) => FieldElem::Residue {
                value: reduce_bigint(v, p),
                modulus: p,
            },
        }
    }

    /// Builds `num/den` in this field.
    pub fn from_ratio(self, num: &BigInt, den: &BigInt) -> Result<FieldElem, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        match self {
            Field::Rational => Ok(FieldElem::Rational(BigRational::new(
                num.clone(),
                den.clone(),
            ))),
            Field::Prime(_) => self.from_bigint(num).try_div(&self.from_bigint(den)),
        }
    }

    pub fn from_rational(self, r: &BigRational) -> Result<FieldElem, AlgebraError> {
        self.from_ratio(r.numer(), r.denom())
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "Q"),
            Field::Prime(p) => write!(f, "GF({p})"),
        }
    }
}

impl FromStr for Field {
    type Err = AlgebraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "Q" {
            return Ok(Field::Rational);
        }
        if let Some(inner) = s.strip_prefix("GF(").and_then(|r| r.strip_suffix(')')) {
            let p: u64 = inner
                .trim()
                .parse()
                .map_err(|_| AlgebraError::parse(0, format!("bad modulus in field tag `{s}`")))?;
            if !super::prime::is_prime_u64(p) {
                return Err(AlgebraError::parse(0, format!("modulus {p} is not prime")));
            }
            return Ok(Field::Prime(p));
        }
        Err(AlgebraError::parse(0, format!("unknown field tag `{s}`")))
    }
}

fn reduce_bigint(v: &BigInt, p: u64) -> u64 {
    let r = v.mod_floor(&BigInt::from(p));
    r.to_u64().expect("residue fits in u64")
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// An element of a [`Field`].
///
/// Rationals are kept in lowest terms with a positive denominator; residues
/// live in `[0, p)`. Arithmetic across different fields is rejected.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FieldElem {
    Rational(BigRational),
    Residue { value: u64, modulus: u64 },
}

impl FieldElem {
    pub fn field(&self) -> Field {
        match self {
            FieldElem::Rational(_) => Field::Rational,
            FieldElem::Residue { modulus, .. } => Field::Prime(*modulus),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldElem::Rational(r) => r.is_zero(),
            FieldElem::Residue { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            FieldElem::Rational(r) => r.is_one(),
            FieldElem::Residue { value, .. } => *value == 1,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            FieldElem::Rational(r) => Some(r),
            FieldElem::Residue { .. } => None,
        }
    }

    fn check(&self, other: &FieldElem) -> Result<(), AlgebraError> {
        if self.field() == other.field() {
            Ok(())
        } else {
            Err(AlgebraError::FieldMismatch {
                left: self.field(),
                right: other.field(),
            })
        }
    }

    pub fn try_add(&self, other: &FieldElem) -> Result<FieldElem, AlgebraError> {
        self.check(other)?;
        Ok(match (self, other) {
            (FieldElem::Rational(a), FieldElem::Rational(b)) => FieldElem::Rational(a + b),
            (FieldElem::Residue { value: a, modulus }, FieldElem::Residue { value: b, .. }) => {
                FieldElem::Residue {
                    value: ((*a as u128 + *b as u128) % *modulus as u128) as u64,
                    modulus: *modulus,
                }
            }
            _ => unreachable!(),
        })
    }

    pub fn try_sub(&self, other: &FieldElem) -> Result<FieldElem, AlgebraError> {
        self.try_add(&other.neg())
    }

    pub fn try_mul(&self, other: &FieldElem) -> Result<FieldElem, AlgebraError> {
        self.check(other)?;
        Ok(match (self, other) {
            (FieldElem::Rational(a), FieldElem::Rational(b)) => FieldElem::Rational(a * b),
            (FieldElem::Residue { value: a, modulus }, FieldElem::Residue { value: b, .. }) => {
                FieldElem::Residue {
                    value: mul_mod(*a, *b, *modulus),
                    modulus: *modulus,
                }
            }
            _ => unreachable!(),
        })
    }

    pub fn try_div(&self, other: &FieldElem) -> Result<FieldElem, AlgebraError> {
        self.check(other)?;
        self.try_mul(&other.inv()?)
    }

    pub fn inv(&self) -> Result<FieldElem, AlgebraError> {
        if self.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(match self {
            FieldElem::Rational(r) => FieldElem::Rational(r.recip()),
            FieldElem::Residue { value, modulus } => FieldElem::Residue {
                value: pow_mod(*value, modulus - 2, *modulus),
                modulus: *modulus,
            },
        })
    }

    pub fn pow(&self, exp: u32) -> FieldElem {
        match self {
            FieldElem::Rational(r) => FieldElem::Rational(num_traits::pow(r.clone(), exp as usize)),
            FieldElem::Residue { value, modulus } => FieldElem::Residue {
                value: pow_mod(*value, exp as u64, *modulus),
                modulus: *modulus,
            },
        }
    }

    /// Canonical text form used by the file formats: `num/den` for
    /// rationals (denominator always written), the residue for `GF(p)`.
    pub fn to_canonical_string(&self) -> String {
        match self {
            FieldElem::Rational(r) => format!("{}/{}", r.numer(), r.denom()),
            FieldElem::Residue { value, .. } => value.to_string(),
        }
    }

    /// Parses `a`, `a/b` or `-a/b` into the given field.
    pub fn parse_in(field: Field, text: &str) -> Result<FieldElem, AlgebraError> {
        let text = text.trim();
        let (num, den) = match text.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (text, "1"),
        };
        let num: BigInt = num
            .parse()
            .map_err(|_| AlgebraError::parse(0, format!("bad numerator `{num}`")))?;
        let den: BigInt = den
            .parse()
            .map_err(|_| AlgebraError::parse(0, format!("bad denominator `{den}`")))?;
        if den.is_negative() {
            return field.from_ratio(&-num, &-den);
        }
        field.from_ratio(&num, &den)
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElem::Rational(r) => write!(f, "{r}"),
            FieldElem::Residue { value, .. } => write!(f, "{value}"),
        }
    }
}

impl Neg for &FieldElem {
    type Output = FieldElem;

    fn neg(self) -> FieldElem {
        match self {
            FieldElem::Rational(r) => FieldElem::Rational(-r),
            FieldElem::Residue { value, modulus } => FieldElem::Residue {
                value: if *value == 0 { 0 } else { modulus - value },
                modulus: *modulus,
            },
        }
    }
}

impl Neg for FieldElem {
    type Output = FieldElem;

    fn neg(self) -> FieldElem {
        -&self
    }
}

// Operator forms panic on mixed fields; callers validate fields up front.
macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&FieldElem> for &FieldElem {
            type Output = FieldElem;
            fn $method(self, rhs: &FieldElem) -> FieldElem {
                self.$checked(rhs).expect("mixed-field arithmetic")
            }
        }
        impl $trait<FieldElem> for FieldElem {
            type Output = FieldElem;
            fn $method(self, rhs: FieldElem) -> FieldElem {
                (&self).$checked(&rhs).expect("mixed-field arithmetic")
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);
