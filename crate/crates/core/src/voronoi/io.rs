//! Line-oriented text format for a [`CellComplex`].
//!
//! ```text
//! crackgen-complex 1
//! counts <V> <E> <F> <C>
//! v <x> <y> <z>
//! a <tail> <head> <weight>
//! f <boundary 0|1> <weight> <n> <±arc> ...
//! c <generator> <n> <±facet> ...
//! ```
//!
//! Floats use the shortest decimal form that parses back to the same bits.

use std::io::{BufRead, Write};

use glam::DVec3;
use thiserror::Error;

use super::complex::{Arc, Cell, CellComplex, Facet};

const MAGIC: &str = "crackgen-complex 1";

#[derive(Debug, Error)]
pub enum ComplexFormatError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn signed(id: usize, s: i8) -> String {
    format!("{}{id}", if s > 0 { '+' } else { '-' })
}

impl CellComplex {
    pub fn write_text<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{MAGIC}")?;
        writeln!(w, "counts {} {} {} {}", self.vertices.len(), self.arcs.len(), self.facets.len(), self.cells.len())?;
        for v in &self.vertices {
            writeln!(w, "v {} {} {}", v.x, v.y, v.z)?;
        }
        for a in &self.arcs {
            writeln!(w, "a {} {} {}", a.tail, a.head, a.weight)?;
        }
        for f in &self.facets {
            write!(w, "f {} {} {}", u8::from(f.on_boundary), f.weight, f.arcs.len())?;
            for &(a, s) in &f.arcs {
                write!(w, " {}", signed(a, s))?;
            }
            writeln!(w)?;
        }
        for c in &self.cells {
            write!(w, "c {} {}", c.generator_id, c.facets.len())?;
            for &(f, s) in &c.facets {
                write!(w, " {}", signed(f, s))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_text(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn read_text<R: BufRead>(r: R) -> Result<CellComplex, ComplexFormatError> {
        let mut lines = r.lines().enumerate().filter(|(_, l)| l.as_ref().map_or(true, |l| !l.trim().is_empty()));
        let mut next = |what: &str| -> Result<(usize, String), ComplexFormatError> {
            match lines.next() {
                Some((i, l)) => Ok((i + 1, l?)),
                None => Err(ComplexFormatError::Parse { line: 0, msg: format!("unexpected end of input, expected {what}") }),
            }
        };
        let (ln, magic) = next("header")?;
        if magic.trim() != MAGIC {
            return Err(ComplexFormatError::Parse { line: ln, msg: "bad header".into() });
        }
        let (ln, counts) = next("counts")?;
        let c = Fields::new(ln, &counts, "counts")?.usizes(4)?;
        let mut k = CellComplex { vertices: Vec::with_capacity(c[0]), arcs: Vec::new(), facets: Vec::new(), cells: Vec::new() };
        for _ in 0..c[0] {
            let (ln, l) = next("vertex")?;
            let mut f = Fields::new(ln, &l, "v")?;
            k.vertices.push(DVec3::new(f.f64()?, f.f64()?, f.f64()?));
            f.end()?;
        }
        for _ in 0..c[1] {
            let (ln, l) = next("arc")?;
            let mut f = Fields::new(ln, &l, "a")?;
            k.arcs.push(Arc { tail: f.usize()?, head: f.usize()?, weight: f.f64()? });
            f.end()?;
        }
        for _ in 0..c[2] {
            let (ln, l) = next("facet")?;
            let mut f = Fields::new(ln, &l, "f")?;
            let on_boundary = match f.usize()? {
                0 => false,
                1 => true,
                b => return Err(f.err(format!("boundary flag {b}"))),
            };
            let weight = f.f64()?;
            let n = f.usize()?;
            let arcs = (0..n).map(|_| f.signed()).collect::<Result<_, _>>()?;
            f.end()?;
            k.facets.push(Facet { arcs, weight, on_boundary });
        }
        for _ in 0..c[3] {
            let (ln, l) = next("cell")?;
            let mut f = Fields::new(ln, &l, "c")?;
            let generator_id = f.usize()?;
            let n = f.usize()?;
            let facets = (0..n).map(|_| f.signed()).collect::<Result<_, _>>()?;
            f.end()?;
            k.cells.push(Cell { generator_id, facets });
        }
        Ok(k)
    }
}

struct Fields<'a> {
    line: usize,
    it: std::str::SplitWhitespace<'a>,
}

impl<'a> Fields<'a> {
    fn new(line: usize, text: &'a str, tag: &str) -> Result<Self, ComplexFormatError> {
        let mut it = text.split_whitespace();
        if it.next() != Some(tag) {
            return Err(ComplexFormatError::Parse { line, msg: format!("expected '{tag}' record") });
        }
        Ok(Fields { line, it })
    }

    fn err(&self, msg: String) -> ComplexFormatError {
        ComplexFormatError::Parse { line: self.line, msg }
    }

    fn token(&mut self) -> Result<&'a str, ComplexFormatError> {
        self.it.next().ok_or_else(|| ComplexFormatError::Parse { line: self.line, msg: "missing field".into() })
    }

    fn usize(&mut self) -> Result<usize, ComplexFormatError> {
        let t = self.token()?;
        t.parse().map_err(|_| self.err(format!("bad integer '{t}'")))
    }

    fn usizes(mut self, n: usize) -> Result<Vec<usize>, ComplexFormatError> {
        let v = (0..n).map(|_| self.usize()).collect::<Result<Vec<_>, _>>()?;
        self.end()?;
        Ok(v)
    }

    fn f64(&mut self) -> Result<f64, ComplexFormatError> {
        let t = self.token()?;
        t.parse().map_err(|_| self.err(format!("bad number '{t}'")))
    }

    fn signed(&mut self) -> Result<(usize, i8), ComplexFormatError> {
        let t = self.token()?;
        let (s, rest) = match t.as_bytes().first() {
            Some(b'+') => (1, &t[1..]),
            Some(b'-') => (-1, &t[1..]),
            _ => return Err(self.err(format!("expected signed id, got '{t}'"))),
        };
        Ok((rest.parse().map_err(|_| self.err(format!("bad id '{t}'")))?, s))
    }

    fn end(mut self) -> Result<(), ComplexFormatError> {
        match self.it.next() {
            None => Ok(()),
            Some(t) => Err(self.err(format!("trailing field '{t}'"))),
        }
    }
}
