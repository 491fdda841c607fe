//! OpenQASM 2.0 subset.

use std::f64::consts::PI;

use crate::error::{Error, Result};

use super::{Circuit, GateKind, GateOp};

fn err(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, col, msg: msg.into() }
}

/// Arithmetic over numbers, `pi`, `+ - * / ^` and parentheses.
struct Expr<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Expr<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn sum(&mut self) -> std::result::Result<f64, String> {
        let mut v = self.product()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let r = self.product()?;
            v = if op == b'+' { v + r } else { v - r };
        }
        Ok(v)
    }

    fn product(&mut self) -> std::result::Result<f64, String> {
        let mut v = self.power()?;
        while let Some(op @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let r = self.power()?;
            v = if op == b'*' { v * r } else { v / r };
        }
        Ok(v)
    }

    fn power(&mut self) -> std::result::Result<f64, String> {
        let base = self.unary()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            return Ok(base.powf(self.power()?));
        }
        Ok(base)
    }

    fn unary(&mut self) -> std::result::Result<f64, String> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> std::result::Result<f64, String> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.sum()?;
                if self.peek() != Some(b')') {
                    return Err("expected `)`".into());
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                match &self.src[start..self.pos] {
                    b"pi" => Ok(PI),
                    other => Err(format!("unknown identifier `{}`", String::from_utf8_lossy(other))),
                }
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.pos;
                while self.pos < self.src.len() {
                    let c = self.src[self.pos];
                    let exp_sign = (c == b'+' || c == b'-') && matches!(self.src[self.pos - 1], b'e' | b'E');
                    if c.is_ascii_digit() || c == b'.' || c == b'e' || c == b'E' || exp_sign {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                let s = std::str::from_utf8(&self.src[start..self.pos]).map_err(|e| e.to_string())?;
                s.parse::<f64>().map_err(|_| format!("bad number `{s}`"))
            }
            _ => Err("expected a number".into()),
        }
    }
}

/// Evaluates a parameter expression such as `-pi/4` or `2*pi/8`.
pub fn eval_expr(text: &str) -> std::result::Result<f64, String> {
    let mut e = Expr { src: text.as_bytes(), pos: 0 };
    let v = e.sum()?;
    if e.peek().is_some() {
        return Err(format!("trailing input in `{text}`"));
    }
    Ok(v)
}

/// Byte offset → (line, column), both 1-based.
fn position(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let col = offset - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, col)
}

struct Register {
    name: String,
    offset: usize,
    size: usize,
}

pub(super) fn parse(text: &str) -> Result<Circuit> {
    // Blank out comments so offsets stay valid.
    let mut clean = String::with_capacity(text.len());
    for line in text.split_inclusive('\n') {
        match line.find("//") {
            Some(i) => {
                clean.push_str(&line[..i]);
                for ch in line[i..].chars() {
                    if ch == '\n' {
                        clean.push('\n');
                    } else {
                        clean.extend(std::iter::repeat_n(' ', ch.len_utf8()));
                    }
                }
            }
            None => clean.push_str(line),
        }
    }
    let mut regs: Vec<Register> = Vec::new();
    let mut ops: Vec<(GateOp, usize, usize)> = Vec::new();
    let mut start = 0;
    for stmt in clean.split_inclusive(';') {
        let offset = start + (stmt.len() - stmt.trim_start().len());
        start += stmt.len();
        let body = stmt.trim();
        let (line, col) = position(&clean, offset.min(clean.len()));
        if body.is_empty() {
            continue;
        }
        let Some(body) = body.strip_suffix(';') else {
            return Err(err(line, col, "missing `;`"));
        };
        let body = body.trim();
        let word_end = body.find(|c: char| !(c.is_ascii_alphanumeric() || c == '_')).unwrap_or(body.len());
        let (word, rest) = body.split_at(word_end);
        match word {
            "OPENQASM" => {
                if !rest.trim().starts_with('2') {
                    return Err(err(line, col, format!("unsupported OpenQASM version `{}`", rest.trim())));
                }
            }
            "include" | "creg" | "barrier" => {}
            "qreg" => {
                let (name, size) = parse_index(rest.trim()).map_err(|m| err(line, col, m))?;
                let offset = regs.iter().map(|r| r.size).sum();
                regs.push(Register { name, offset, size });
            }
            "measure" | "reset" | "if" | "gate" | "opaque" => {
                return Err(err(line, col, format!("`{word}` statements are not supported")));
            }
            "" => return Err(err(line, col, "expected a statement")),
            name => {
                let kind = GateKind::from_name(name)?;
                let rest = rest.trim_start();
                let (params, args) = if let Some(inner) = rest.strip_prefix('(') {
                    let close = inner.find(')').ok_or_else(|| err(line, col, "missing `)`"))?;
                    let exprs: Vec<&str> = inner[..close].split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
                    let vals = exprs
                        .iter()
                        .map(|e| eval_expr(e))
                        .collect::<std::result::Result<Vec<f64>, String>>()
                        .map_err(|m| err(line, col, m))?;
                    (vals, &inner[close + 1..])
                } else {
                    (Vec::new(), rest)
                };
                let mut qubits = Vec::new();
                for a in args.split(',') {
                    let (reg, idx) = parse_index(a.trim()).map_err(|m| err(line, col, m))?;
                    let r = regs
                        .iter()
                        .find(|r| r.name == reg)
                        .ok_or_else(|| err(line, col, format!("unknown register `{reg}`")))?;
                    if idx >= r.size {
                        return Err(Error::QubitOutOfRange { index: idx, n_qubits: r.size });
                    }
                    qubits.push(r.offset + idx);
                }
                if params.len() != kind.n_params() {
                    return Err(err(line, col, format!("`{name}` takes {} parameter(s)", kind.n_params())));
                }
                if qubits.len() != kind.arity() {
                    return Err(err(line, col, format!("`{name}` acts on {} qubit(s)", kind.arity())));
                }
                ops.push((GateOp::named(name, &qubits, &params)?, line, col));
            }
        }
    }
    let n = regs.iter().map(|r| r.size).sum::<usize>();
    let mut c = Circuit::new(n.max(1))?;
    if n == 0 && !ops.is_empty() {
        return Err(err(ops[0].1, ops[0].2, "gate used before any `qreg`"));
    }
    for (op, line, col) in ops {
        c.push(op).map_err(|e| match e {
            Error::InvalidArgument(m) => err(line, col, m),
            other => other,
        })?;
    }
    Ok(c)
}

/// `name[idx]` → `(name, idx)`.
fn parse_index(s: &str) -> std::result::Result<(String, usize), String> {
    let open = s.find('[').ok_or_else(|| format!("expected `name[index]`, found `{s}`"))?;
    let close = s.rfind(']').filter(|&c| c > open).ok_or_else(|| format!("missing `]` in `{s}`"))?;
    if !s[close + 1..].trim().is_empty() {
        return Err(format!("unexpected `{}`", &s[close + 1..]));
    }
    let idx = s[open + 1..close].trim().parse::<usize>().map_err(|_| format!("bad index in `{s}`"))?;
    Ok((s[..open].trim().to_string(), idx))
}

pub(super) fn emit(c: &Circuit) -> Result<String> {
    let mut out = format!("OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[{}];\n", c.n_qubits);
    for op in &c.ops {
        if let GateKind::Opaque { .. } = op.kind {
            return Err(Error::Unsupported(format!(
                "`{}` is an explicit matrix and can only be written as JSON",
                op.kind.name()
            )));
        }
        out.push_str(op.kind.name());
        let params = op.external_params();
        if !params.is_empty() {
            let p: Vec<String> = params.iter().map(|v| format!("{v:?}")).collect();
            out.push_str(&format!("({})", p.join(",")));
        }
        let q: Vec<String> = op.qubits.iter().map(|i| format!("q[{i}]")).collect();
        out.push_str(&format!(" {};\n", q.join(",")));
    }
    Ok(out)
}
