//! Line-oriented text formats for families, tensors, decompositions and
//! matching lists.
//!
//! Everything after `#` on a line is ignored; tokens are separated by any
//! whitespace. Serialization is canonical (single spaces, one matrix row or
//! one vector per line), so `serialize(parse(serialize(x)))` is byte-stable.
//!
//! ```text
//! mapfamily 1          tensor3 1            decomp 1
//! field 2              field 2              field 2
//! n 2                  dims 1 2 2           dims 1 2 2
//! count 1              1 0                  terms 1
//! 1 0                  0 1                  1
//! 0 1                                       1 0
//!                                           1 0
//! ```
//!
//! Matching lists give one matching per line as 1-based `i:j` pairs, with
//! `-` for the empty matching:
//!
//! ```text
//! matchings 1
//! n 3
//! count 2
//! 1:2 2:3
//! -
//! ```

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::families::{MapFamily, Matching};
use crate::linalg::{FieldSpec, Matrix};
use crate::tensor::{Decomposition, RankOneTerm, Tensor3};

struct Lines<'a> {
    lines: Vec<(usize, Vec<&'a str>)>,
    pos: usize,
    tok: usize,
    last_line: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let lines: Vec<_> = text
            .lines()
            .enumerate()
            .filter_map(|(i, l)| {
                let body = l.split('#').next().unwrap_or("");
                let toks: Vec<&str> = body.split_whitespace().collect();
                (!toks.is_empty()).then_some((i + 1, toks))
            })
            .collect();
        let last_line = lines.last().map_or(1, |l| l.0);
        Lines {
            lines,
            pos: 0,
            tok: 0,
            last_line,
        }
    }

    fn err(line: usize, msg: impl Into<String>) -> Error {
        Error::Parse { line, msg: msg.into() }
    }

    fn line_no(&self) -> usize {
        self.lines.get(self.pos).map_or(self.last_line, |l| l.0)
    }

    /// Next token, crossing line boundaries.
    fn token(&mut self) -> Result<(usize, &'a str)> {
        while let Some((no, toks)) = self.lines.get(self.pos) {
            if let Some(&t) = toks.get(self.tok) {
                self.tok += 1;
                return Ok((*no, t));
            }
            self.pos += 1;
            self.tok = 0;
        }
        Err(Self::err(self.last_line, "unexpected end of input"))
    }

    /// The remaining tokens of the next unread line.
    fn line(&mut self) -> Result<(usize, Vec<&'a str>)> {
        if self.tok > 0 {
            if self.tok < self.lines[self.pos].1.len() {
                return Err(Self::err(self.line_no(), "trailing tokens"));
            }
            self.pos += 1;
            self.tok = 0;
        }
        let Some((no, toks)) = self.lines.get(self.pos) else {
            return Err(Self::err(self.last_line, "unexpected end of input"));
        };
        let out = (*no, toks.clone());
        self.pos += 1;
        Ok(out)
    }

    fn number<T: std::str::FromStr>(&mut self, what: &str) -> Result<T> {
        let (no, t) = self.token()?;
        t.parse().map_err(|_| Self::err(no, format!("expected {what}, found `{t}`")))
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        let (no, t) = self.token()?;
        if t != kw {
            return Err(Self::err(no, format!("expected `{kw}`, found `{t}`")));
        }
        Ok(())
    }

    fn header(&mut self, magic: &str) -> Result<()> {
        self.keyword(magic)?;
        let line = self.line_no();
        let v: u32 = self.number("format version")?;
        if v != 1 {
            return Err(Self::err(line, format!("unsupported {magic} version {v}")));
        }
        Ok(())
    }

    fn field(&mut self) -> Result<FieldSpec> {
        self.keyword("field")?;
        let line = self.line_no();
        let p: u64 = self.number("field modulus")?;
        FieldSpec::new(p).map_err(|e| Self::err(line, e.to_string()))
    }

    fn residue(&mut self, field: FieldSpec) -> Result<u32> {
        let (no, t) = self.token()?;
        match t.parse::<u32>() {
            Ok(x) if x < field.modulus() => Ok(x),
            _ => Err(Self::err(no, format!("expected a residue mod {}, found `{t}`", field.modulus()))),
        }
    }

    fn residues(&mut self, field: FieldSpec, count: usize) -> Result<Vec<u32>> {
        (0..count).map(|_| self.residue(field)).collect()
    }

    fn dims(&mut self) -> Result<(usize, usize, usize)> {
        self.keyword("dims")?;
        Ok((self.number("d1")?, self.number("d2")?, self.number("d3")?))
    }

    fn finish(&mut self) -> Result<()> {
        match self.token() {
            Ok((no, t)) => Err(Self::err(no, format!("unexpected trailing `{t}`"))),
            Err(_) => Ok(()),
        }
    }
}

fn join(out: &mut String, xs: &[u32]) {
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{x}");
    }
    out.push('\n');
}

fn wrap(line: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        e @ Error::Parse { .. } => e,
        e => Error::Parse {
            line,
            msg: e.to_string(),
        },
    }
}

pub fn parse_maps(text: &str) -> Result<MapFamily> {
    let mut lx = Lines::new(text);
    lx.header("mapfamily")?;
    let field = lx.field()?;
    lx.keyword("n")?;
    let n: usize = lx.number("n")?;
    lx.keyword("count")?;
    let line = lx.line_no();
    let count: usize = lx.number("count")?;
    let mut maps = Vec::with_capacity(count);
    for _ in 0..count {
        let data = lx.residues(field, n * n)?;
        maps.push(Matrix::from_vec(field, n, n, data)?);
    }
    lx.finish()?;
    MapFamily::new(field, n, maps).map_err(wrap(line))
}

pub fn write_maps(fam: &MapFamily) -> String {
    let n = fam.n();
    let mut out = format!("mapfamily 1\nfield {}\nn {n}\ncount {}\n", fam.field().modulus(), fam.len());
    for m in fam.maps() {
        for r in 0..n {
            join(&mut out, m.row(r));
        }
    }
    out
}

pub fn parse_tensor(text: &str) -> Result<Tensor3> {
    let mut lx = Lines::new(text);
    lx.header("tensor3")?;
    let field = lx.field()?;
    let dims = lx.dims()?;
    let len = dims
        .0
        .checked_mul(dims.1)
        .and_then(|x| x.checked_mul(dims.2))
        .ok_or_else(|| Lines::err(lx.line_no(), "tensor too large"))?;
    let data = lx.residues(field, len)?;
    lx.finish()?;
    Tensor3::new(field, dims, data)
}

pub fn write_tensor(t: &Tensor3) -> String {
    let (d1, d2, d3) = t.dims();
    let mut out = format!("tensor3 1\nfield {}\ndims {d1} {d2} {d3}\n", t.field().modulus());
    if d3 > 0 {
        for row in t.entries().chunks(d3) {
            join(&mut out, row);
        }
    }
    out
}

pub fn parse_decomposition(text: &str) -> Result<Decomposition> {
    let mut lx = Lines::new(text);
    lx.header("decomp")?;
    let field = lx.field()?;
    let dims = lx.dims()?;
    lx.keyword("terms")?;
    let r: usize = lx.number("term count")?;
    let mut terms = Vec::with_capacity(r);
    for _ in 0..r {
        let f = lx.residues(field, dims.0)?;
        let g = lx.residues(field, dims.1)?;
        let h = lx.residues(field, dims.2)?;
        terms.push(RankOneTerm::new(f, g, h));
    }
    lx.finish()?;
    Decomposition::new(field, dims, terms)
}

pub fn write_decomposition(d: &Decomposition) -> String {
    let (d1, d2, d3) = d.dims();
    let mut out = format!(
        "decomp 1\nfield {}\ndims {d1} {d2} {d3}\nterms {}\n",
        d.field().modulus(),
        d.len()
    );
    for t in d.terms() {
        join(&mut out, &t.f);
        join(&mut out, &t.g);
        join(&mut out, &t.h);
    }
    out
}

pub fn parse_matchings(text: &str) -> Result<Vec<Matching>> {
    let mut lx = Lines::new(text);
    lx.header("matchings")?;
    lx.keyword("n")?;
    let n: usize = lx.number("n")?;
    lx.keyword("count")?;
    let k: usize = lx.number("count")?;
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        let (no, toks) = lx.line()?;
        let mut pairs = Vec::new();
        if toks != ["-"] {
            for t in &toks {
                let bad = || Lines::err(no, format!("expected a pair i:j, found `{t}`"));
                let (i, j) = t.split_once(':').ok_or_else(bad)?;
                let i: usize = i.parse().map_err(|_| bad())?;
                let j: usize = j.parse().map_err(|_| bad())?;
                if i == 0 || j == 0 {
                    return Err(Lines::err(no, format!("pair `{t}` is not 1-based")));
                }
                pairs.push((i - 1, j - 1));
            }
        }
        out.push(Matching::new(n, pairs).map_err(wrap(no))?);
    }
    lx.finish()?;
    Ok(out)
}

pub fn write_matchings(n: usize, ms: &[Matching]) -> String {
    let mut out = format!("matchings 1\nn {n}\ncount {}\n", ms.len());
    for m in ms {
        if m.pairs().is_empty() {
            out.push('-');
        } else {
            let parts: Vec<String> = m.pairs().iter().map(|(i, j)| format!("{}:{}", i + 1, j + 1)).collect();
            out.push_str(&parts.join(" "));
        }
        out.push('\n');
    }
    out
}

/// Basis rows of a subspace, one vector per line.
pub fn write_rows(m: &Matrix) -> String {
    let mut out = String::new();
    for r in 0..m.rows() {
        join(&mut out, m.row(r));
    }
    out
}
