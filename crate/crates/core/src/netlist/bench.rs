// SPDX-License-Identifier: Apache-2.0

//! ISCAS `.bench` reader and writer, extended with LUT cells.
//!
//! ```text
//! INPUT(a)
//! OUTPUT(o)
//! n = NAND(a, b)
//! o = LUT 0x8 (a, n)     # bit i of the literal: output for pattern i, first input MSB
//! k = LUT KEY (a, b)     # key LUT; content supplied by a key file
//! ```

use std::fmt::Write as _;
use std::path::Path;

use super::{GateKind, Netlist, NetlistBuilder, NetlistError};

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse { path: String, source: NetlistError },
}

/// Reads a bench file; the netlist is named after the file stem.
pub fn read_bench(path: impl AsRef<Path>) -> Result<Netlist, LoadError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut n = parse_bench(&text).map_err(|source| LoadError::Parse {
        path: path.display().to_string(),
        source,
    })?;
    if let Some(stem) = path.file_stem() {
        n.set_name(stem.to_string_lossy());
    }
    Ok(n)
}

pub fn parse_bench(text: &str) -> Result<Netlist, NetlistError> {
    let mut builder = NetlistBuilder::new("bench");
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        parse_line(content, line_no, &mut builder)?;
    }
    builder.build()
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.text[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn error(&self, message: impl Into<String>) -> NetlistError {
        NetlistError::Syntax {
            line: self.line,
            column: self.text[..self.pos].chars().count() + 1,
            message: message.into(),
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.text[self.pos..].chars().next()
    }

    fn expect(&mut self, want: char) -> Result<(), NetlistError> {
        match self.peek() {
            Some(c) if c == want => {
                self.pos += c.len_utf8();
                Ok(())
            }
            Some(c) => Err(self.error(format!("expected `{want}`, found `{c}`"))),
            None => Err(self.error(format!("expected `{want}`, found end of line"))),
        }
    }

    fn ident(&mut self) -> Result<&'a str, NetlistError> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.text[self.pos..].chars().next() {
            if c.is_whitespace() || matches!(c, '(' | ')' | ',' | '=') {
                break;
            }
            self.pos += c.len_utf8();
        }
        if self.pos == start {
            return Err(self.error("expected a net name"));
        }
        Ok(&self.text[start..self.pos])
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn arg_list(&mut self) -> Result<Vec<&'a str>, NetlistError> {
        self.expect('(')?;
        let mut args = vec![self.ident()?];
        loop {
            match self.peek() {
                Some(',') => {
                    self.pos += 1;
                    args.push(self.ident()?);
                }
                Some(')') => {
                    self.pos += 1;
                    return Ok(args);
                }
                Some(c) => return Err(self.error(format!("expected `,` or `)`, found `{c}`"))),
                None => return Err(self.error("unterminated argument list")),
            }
        }
    }
}

fn parse_line(text: &str, line: usize, b: &mut NetlistBuilder) -> Result<(), NetlistError> {
    let mut cur = Cursor { text, pos: 0, line };
    let first = cur.ident()?;
    let upper = first.to_ascii_uppercase();
    if (upper == "INPUT" || upper == "OUTPUT") && cur.peek() == Some('(') {
        let args = cur.arg_list()?;
        if args.len() != 1 {
            return Err(cur.error(format!("{upper} takes exactly one net")));
        }
        if !cur.at_end() {
            return Err(cur.error("trailing text"));
        }
        if upper == "INPUT" {
            b.input_at(args[0], line);
        } else {
            b.output_at(args[0], line);
        }
        return Ok(());
    }

    let net = first;
    cur.expect('=')?;
    let kind_start = {
        cur.skip_ws();
        cur.pos
    };
    let kind_word = cur.ident()?;
    let upper_kind = kind_word.to_ascii_uppercase();
    if matches!(upper_kind.as_str(), "DFF" | "DFFR" | "LATCH") {
        return Err(NetlistError::Sequential {
            element: net.to_string(),
            line,
        });
    }
    let Some(kind) = GateKind::from_keyword(kind_word) else {
        cur.pos = kind_start;
        return Err(cur.error(format!("unknown gate type `{kind_word}`")));
    };

    if kind != GateKind::Lut {
        let args = cur.arg_list()?;
        if !cur.at_end() {
            return Err(cur.error("trailing text"));
        }
        b.push_gate(net, kind, &args, None, false, line);
        return Ok(());
    }

    let literal_start = {
        cur.skip_ws();
        cur.pos
    };
    let literal = cur.ident()?;
    let args = cur.arg_list()?;
    if !cur.at_end() {
        return Err(cur.error("trailing text"));
    }
    let width = 1usize << args.len().min(16);
    if literal.eq_ignore_ascii_case("KEY") {
        b.push_gate(net, kind, &args, Some(vec![false; width]), true, line);
        return Ok(());
    }
    let digits = literal
        .strip_prefix("0x")
        .or_else(|| literal.strip_prefix("0X"))
        .ok_or_else(|| {
            cur.pos = literal_start;
            cur.error("LUT content must be a 0x hex literal or KEY")
        })?;
    let bits = decode_hex(digits, width).map_err(|found| match found {
        Some(found) => NetlistError::LutLengthMismatch {
            net: net.to_string(),
            line,
            expected: hex_digits(width),
            found,
        },
        None => {
            let mut c = Cursor {
                text,
                pos: literal_start,
                line,
            };
            c.skip_ws();
            c.error(format!("invalid hex literal `{literal}`"))
        }
    })?;
    b.push_gate(net, kind, &args, Some(bits), false, line);
    Ok(())
}

fn hex_digits(width: usize) -> usize {
    width.div_ceil(4)
}

/// Decodes `digits` into `width` bits, bit 0 = least significant.
/// `Err(Some(n))` is a length mismatch with `n` digits found; `Err(None)` a
/// non-hex character.
fn decode_hex(digits: &str, width: usize) -> Result<Vec<bool>, Option<usize>> {
    if !digits.chars().all(|c| c.is_ascii_hexdigit()) || digits.is_empty() {
        return Err(None);
    }
    if digits.len() != hex_digits(width) {
        return Err(Some(digits.len()));
    }
    let mut bits = vec![false; width];
    for (pos, c) in digits.chars().rev().enumerate() {
        let nibble = c.to_digit(16).unwrap() as usize;
        for k in 0..4 {
            if nibble >> k & 1 == 1 {
                let i = pos * 4 + k;
                if i >= width {
                    // Set bits beyond the table do not fit the arity.
                    return Err(Some(digits.len()));
                }
                bits[i] = true;
            }
        }
    }
    Ok(bits)
}

fn encode_hex(bits: &[bool]) -> String {
    let digits = hex_digits(bits.len());
    (0..digits)
        .rev()
        .map(|d| {
            let nibble = (0..4)
                .filter(|k| bits.get(d * 4 + k).copied().unwrap_or(false))
                .fold(0u32, |acc, k| acc | 1 << k);
            char::from_digit(nibble, 16).unwrap().to_ascii_uppercase()
        })
        .collect()
}

/// Writes `n` in bench form; gates follow topological order. Key LUT
/// contents are not written.
pub fn write_bench(n: &Netlist) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {}", n.name());
    let _ = writeln!(
        out,
        "# {} inputs, {} outputs, {} gates",
        n.primary_inputs().len(),
        n.primary_outputs().len(),
        n.gate_count()
    );
    for &i in n.primary_inputs() {
        let _ = writeln!(out, "INPUT({})", n.net_name(i));
    }
    for &o in n.primary_outputs() {
        let _ = writeln!(out, "OUTPUT({})", n.net_name(o));
    }
    for (id, gate) in n.gates() {
        let args = gate
            .inputs
            .iter()
            .map(|&i| n.net_name(i))
            .collect::<Vec<_>>()
            .join(", ");
        let name = n.net_name(id);
        match (&gate.lut_content, gate.content_is_key) {
            (Some(_), true) => {
                let _ = writeln!(out, "{name} = LUT KEY ({args})");
            }
            (Some(bits), false) => {
                let _ = writeln!(out, "{name} = LUT 0x{} ({args})", encode_hex(bits));
            }
            (None, _) => {
                let _ = writeln!(out, "{name} = {}({args})", gate.kind);
            }
        }
    }
    out
}
