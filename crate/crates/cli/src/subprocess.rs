//! A blackbox backed by a child process: one point per line in, one value
//! per line out.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};

use anyhow::{Context, Result};
use fewvar_core::algebra::{Field, FieldElem};
use fewvar_core::pit::{Blackbox, PitError};

pub struct Subprocess {
    num_vars: usize,
    child: Child,
    stdin: Option<ChildStdin>,
    stdout: BufReader<ChildStdout>,
}

impl Subprocess {
    pub fn spawn(command: &str, num_vars: usize) -> Result<Self> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .with_context(|| format!("starting blackbox `{command}`"))?;
        let stdin = child.stdin.take().context("blackbox stdin")?;
        let stdout = BufReader::new(child.stdout.take().context("blackbox stdout")?);
        Ok(Subprocess {
            num_vars,
            child,
            stdin: Some(stdin),
            stdout,
        })
    }
}

impl Blackbox for Subprocess {
    fn num_vars(&self) -> usize {
        self.num_vars
    }

    fn evaluate(&mut self, point: &[FieldElem]) -> Result<FieldElem, PitError> {
        let line: Vec<String> = point.iter().map(FieldElem::to_canonical_string).collect();
        let stdin = self.stdin.as_mut().expect("open until drop");
        writeln!(stdin, "{}", line.join(" "))
            .and_then(|_| stdin.flush())
            .map_err(|e| PitError::Blackbox(format!("write: {e}")))?;
        let mut reply = String::new();
        let read = self
            .stdout
            .read_line(&mut reply)
            .map_err(|e| PitError::Blackbox(format!("read: {e}")))?;
        if read == 0 {
            return Err(PitError::Blackbox("blackbox closed its output".into()));
        }
        FieldElem::parse_in(Field::Rational, &reply)
            .map_err(|e| PitError::Blackbox(format!("bad reply `{}`: {e}", reply.trim())))
    }
}

impl Drop for Subprocess {
    fn drop(&mut self) {
        drop(self.stdin.take());
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}
