//! Compact kernel grammar.
//!
//! ```text
//! spec := "identity"
//!       | "gauss:sigma=" NUMBER
//!       | "weyl:d=" INTEGER
//!       | "tab:file=" PATH            (square matrix CSV over the context points)
//!       | "rank1:file=" PATH          (single-column CSV of φ over the context points)
//!       | "scale:" NUMBER "(" spec ")"
//!       | "conj:file=" PATH "(" spec ")"
//!       | "sum(" spec "," spec ")"
//! ```

use std::path::Path;

use super::{KernelSpec, Point, PointFn};
use crate::error::{Error, Result};
use crate::io;

/// Extra inputs needed by file-backed kernels.
#[derive(Debug, Default, Clone, Copy)]
pub struct ParseContext<'a> {
    pub points: Option<&'a [Point]>,
    pub base_dir: Option<&'a Path>,
}

pub(super) fn parse(input: &str, ctx: &ParseContext<'_>) -> Result<KernelSpec> {
    run(input, ctx, false)
}

/// Grammar and literal checks only; file-backed leaves are not opened.
pub(super) fn check_syntax(input: &str) -> Result<()> {
    run(input, &ParseContext::default(), true).map(|_| ())
}

fn run(input: &str, ctx: &ParseContext<'_>, syntax_only: bool) -> Result<KernelSpec> {
    let mut parser = Parser {
        input,
        rest: input.trim(),
        ctx,
        syntax_only,
    };
    let spec = parser.spec()?;
    if !parser.rest.trim().is_empty() {
        return Err(parser.fail(format!("unexpected trailing input `{}`", parser.rest)));
    }
    Ok(spec)
}

struct Parser<'s, 'c> {
    input: &'s str,
    rest: &'s str,
    ctx: &'c ParseContext<'c>,
    syntax_only: bool,
}

impl<'s> Parser<'s, '_> {
    fn fail(&self, reason: impl Into<String>) -> Error {
        Error::Parse {
            input: self.input.to_string(),
            reason: reason.into(),
        }
    }

    fn eat(&mut self, token: &str) -> bool {
        match self.rest.strip_prefix(token) {
            Some(r) => {
                self.rest = r.trim_start();
                true
            }
            None => false,
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.fail(format!("expected `{token}` at `{}`", self.rest)))
        }
    }

    /// Consumes up to (not including) the first of `stops` or end of input.
    fn word(&mut self, stops: &[char]) -> &'s str {
        let end = self
            .rest
            .find(|c| stops.contains(&c))
            .unwrap_or(self.rest.len());
        let (w, r) = self.rest.split_at(end);
        self.rest = r;
        w.trim()
    }

    fn number(&mut self) -> Result<f64> {
        let w = self.word(&['(', ')', ',']);
        w.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| self.fail(format!("`{w}` is not a finite number")))
    }

    fn path(&mut self) -> Result<std::path::PathBuf> {
        let w = self.word(&['(', ')', ',']);
        if w.is_empty() {
            return Err(self.fail("empty file name"));
        }
        Ok(match self.ctx.base_dir {
            Some(dir) => dir.join(w),
            None => w.into(),
        })
    }

    fn points(&self, what: &str) -> Result<Vec<Point>> {
        self.ctx
            .points
            .map(<[Point]>::to_vec)
            .ok_or_else(|| self.fail(format!("{what} kernels need a point list")))
    }

    fn spec(&mut self) -> Result<KernelSpec> {
        if self.eat("identity") {
            Ok(KernelSpec::Identity)
        } else if self.eat("gauss:sigma=") {
            let sigma = self.number()?;
            KernelSpec::gaussian(sigma).map_err(|e| self.fail(e.to_string()))
        } else if self.eat("weyl:d=") {
            let w = self.word(&['(', ')', ',']);
            let degree = w
                .parse::<u32>()
                .map_err(|_| self.fail(format!("degree `{w}` is not a nonnegative integer")))?;
            Ok(KernelSpec::weyl(degree))
        } else if self.eat("tab:file=") {
            let path = self.path()?;
            if self.syntax_only {
                return Ok(KernelSpec::Identity);
            }
            let points = self.points("tabulated")?;
            let matrix = io::read_matrix(&path)?;
            KernelSpec::tabulated(points, matrix)
        } else if self.eat("rank1:file=") {
            let path = self.path()?;
            if self.syntax_only {
                return Ok(KernelSpec::Identity);
            }
            let points = self.points("rank-one")?;
            let values = io::read_column(&path)?;
            Ok(KernelSpec::rank_one(PointFn::values(points, values)?))
        } else if self.eat("scale:") {
            let factor = self.number()?;
            self.expect("(")?;
            let inner = self.spec()?;
            self.expect(")")?;
            inner.scaled(factor).map_err(|e| self.fail(e.to_string()))
        } else if self.eat("conj:file=") {
            let path = self.path()?;
            self.expect("(")?;
            let inner = self.spec()?;
            self.expect(")")?;
            if self.syntax_only {
                return Ok(inner);
            }
            let points = self.points("conjugated")?;
            let values = io::read_column(&path)?;
            Ok(inner.conjugated(PointFn::values(points, values)?))
        } else if self.eat("sum(") {
            let a = self.spec()?;
            self.expect(",")?;
            let b = self.spec()?;
            self.expect(")")?;
            Ok(a.sum(b))
        } else {
            Err(self.fail(format!("unknown kernel at `{}`", self.rest)))
        }
    }
}
