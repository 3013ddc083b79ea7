//! Matrices kept as sums `coef * factor(tag)` before evaluation.
//!
//! Every fitted entry is a sum over contributing elements of a geometric
//! coefficient times `kappa*_K` (and, for B, times the trial-side edge
//! weight). Keeping the coefficients separate until the end lets a change of
//! basis combine them in plain arithmetic first, so contributions that cancel
//! algebraically cancel exactly before the huge factors are applied.

use super::sparse::CsrMatrix;
use crate::fitting::{FittingData, LogScaled};

/// Marker for terms that carry no edge weight.
pub const NO_WEIGHT: usize = usize::MAX;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Term {
    pub row: usize,
    pub col: usize,
    pub elem: usize,
    pub weight: usize,
    pub coef: f64,
}

#[derive(Clone, Debug)]
pub struct FactoredMatrix {
    nrows: usize,
    ncols: usize,
    terms: Vec<Term>,
}

impl FactoredMatrix {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        FactoredMatrix {
            nrows,
            ncols,
            terms: Vec::new(),
        }
    }

    pub fn push(&mut self, row: usize, col: usize, elem: usize, weight: usize, coef: f64) {
        debug_assert!(row < self.nrows && col < self.ncols);
        if coef != 0.0 {
            self.terms.push(Term {
                row,
                col,
                elem,
                weight,
                coef,
            });
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Sums coefficients that share position and tag, in a fixed order, and
    /// drops the ones that cancel.
    pub fn compress(&mut self) {
        self.terms
            .sort_by(|a, b| (a.row, a.col, a.elem, a.weight).cmp(&(b.row, b.col, b.elem, b.weight)));
        let mut out: Vec<Term> = Vec::with_capacity(self.terms.len());
        for t in self.terms.drain(..) {
            match out.last_mut() {
                Some(l) if (l.row, l.col, l.elem, l.weight) == (t.row, t.col, t.elem, t.weight) => l.coef += t.coef,
                _ => out.push(t),
            }
        }
        out.retain(|t| t.coef != 0.0);
        self.terms = out;
    }

    /// Applies `rows^T M cols`, where `rows(i)` and `cols(j)` list the
    /// `(new_index, coefficient)` images of old index `i`, `j`.
    pub fn transform(
        &self,
        nrows: usize,
        ncols: usize,
        rows: impl Fn(usize) -> Vec<(usize, f64)>,
        cols: impl Fn(usize) -> Vec<(usize, f64)>,
    ) -> FactoredMatrix {
        let mut out = FactoredMatrix::new(nrows, ncols);
        for t in &self.terms {
            for (r, a) in rows(t.row) {
                for &(c, b) in &cols(t.col) {
                    out.push(r, c, t.elem, t.weight, a * b * t.coef);
                }
            }
        }
        out.compress();
        out
    }

    /// Evaluates every entry as `sum coef * kappa*_elem * weight` in log
    /// arithmetic.
    pub fn evaluate(&self, fitting: &FittingData) -> CsrMatrix<LogScaled> {
        let weights = fitting.weights();
        let mut trip: Vec<(usize, usize, LogScaled)> = Vec::new();
        let mut i = 0;
        while i < self.terms.len() {
            let (r, c) = (self.terms[i].row, self.terms[i].col);
            let mut acc = LogScaled::ZERO;
            while i < self.terms.len() && self.terms[i].row == r && self.terms[i].col == c {
                let t = &self.terms[i];
                let mut f = fitting.kappa_star[t.elem];
                if t.weight != NO_WEIGHT {
                    f = f * weights[t.weight];
                }
                acc = acc + LogScaled::from_f64(t.coef) * f;
                i += 1;
            }
            trip.push((r, c, acc));
        }
        CsrMatrix::from_triplets(self.nrows, self.ncols, trip)
    }
}
