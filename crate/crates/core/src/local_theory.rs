//! Recognizing inertia/decomposition pairs of hyperplanes from `σ` alone,
//! relative to a coordinate projection.

use serde::Serialize;

use crate::algebra::LambdaSubmodule;
use crate::arrangement::{CoordinateMarking, Position, Projection};
use crate::cohomology::Complement;
use crate::error::{Error, Result};
use crate::nilpotent::{centralizer, centralizer_dense, decomposition, is_ell_multiple};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Conditions {
    pub cond1: bool,
    pub cond2: bool,
    pub cond3: bool,
}

impl Conditions {
    pub fn all(&self) -> bool {
        self.cond1 && self.cond2 && self.cond3
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Detection {
    pub hyperplane: Option<usize>,
    pub conditions: Conditions,
    /// false when the context is not the full arrangement
    pub faithful: bool,
}

/// A complement together with a projection `π_z`, reused across many `σ`.
pub struct LocalTheory<'a> {
    ctx: &'a Complement,
    proj: Projection,
    dominant: Vec<usize>,
    faithful: bool,
}

impl<'a> LocalTheory<'a> {
    pub fn new(ctx: &'a Complement, marking: CoordinateMarking) -> Result<Self> {
        let arr = ctx.arrangement();
        let proj = arr.projection(marking)?;
        let dominant = (0..arr.len()).filter(|&i| arr.classify(i, marking) == Position::Dominant).collect();
        Ok(LocalTheory { ctx, proj, dominant, faithful: arr.is_full() })
    }

    pub fn projection(&self) -> &Projection {
        &self.proj
    }
    pub fn dominant(&self) -> &[usize] {
        &self.dominant
    }
    pub fn is_faithful(&self) -> bool {
        self.faithful
    }

    fn check_sigma(&self, sigma: &[u64]) -> Result<()> {
        if sigma.len() != self.ctx.n() {
            return Err(Error::DimensionMismatch { expected: self.ctx.n(), found: sigma.len() });
        }
        if is_ell_multiple(&self.ctx.lambda(), sigma) {
            return Err(Error::Precondition("sigma lies in ell * Pi^a".into()));
        }
        Ok(())
    }

    pub fn conditions(&self, sigma: &[u64]) -> Result<Conditions> {
        self.check_sigma(sigma)?;
        let cond1 = self.dominant.iter().any(|&h| sigma[h] == 0);
        let cond2 = self.proj.source.iter().all(|&s| sigma[s] == 0);
        let cond3 = cond2 && self.cond3_by_size(&centralizer(self.ctx, sigma)?);
        Ok(Conditions { cond1, cond2, cond3 })
    }

    /// `C(σ)/Λσ -> Π^a_z` is bijective iff `π_z(C(σ))` is everything and
    /// `|C(σ)| = |Λ|^{q'+1}`; the second uses that `Λσ` is free of rank one
    /// and sits in the kernel.
    fn cond3_by_size(&self, cent: &LambdaSubmodule) -> bool {
        let lam = self.ctx.lambda();
        let q = self.proj.target.len();
        let image = cent.map(q, |v| self.proj.source.iter().map(|&s| v[s]).collect());
        image.is_full() && cent.log_size() == lam.k() as u64 * (q as u64 + 1)
    }

    /// cond3 with the kernel computed explicitly; used to cross-check.
    pub fn cond3_direct(&self, sigma: &[u64]) -> Result<bool> {
        self.check_sigma(sigma)?;
        if !self.proj.source.iter().all(|&s| sigma[s] == 0) {
            return Ok(false);
        }
        let lam = self.ctx.lambda();
        let n = self.ctx.n();
        let q = self.proj.target.len();
        let cent = centralizer(self.ctx, sigma)?;
        let image = cent.map(q, |v| self.proj.source.iter().map(|&s| v[s]).collect());
        let off_source = LambdaSubmodule::from_generators(
            lam,
            n,
            (0..n).filter(|i| !self.proj.source.contains(i)).map(|i| crate::algebra::submodule::unit_vector(n, i)),
        );
        let kernel = cent.intersect(&off_source);
        let line = LambdaSubmodule::from_generators(lam, n, [sigma.to_vec()]);
        Ok(image.is_full() && kernel == line)
    }

    pub fn detect(&self, sigma: &[u64]) -> Result<Detection> {
        let conditions = self.conditions(sigma)?;
        let none = Detection { hyperplane: None, conditions, faithful: self.faithful };
        if !conditions.all() {
            return Ok(none);
        }
        let lam = self.ctx.lambda();
        let units: Vec<usize> = (0..sigma.len()).filter(|&i| lam.is_unit(sigma[i])).collect();
        let [h0] = units[..] else {
            return Ok(none);
        };
        let mismatch = |detail: &str| -> Result<Detection> {
            if self.faithful {
                Err(Error::VerificationMismatch { hyperplane: h0, detail: detail.to_string() })
            } else {
                Ok(Detection { hyperplane: None, conditions, faithful: false })
            }
        };
        if sigma.iter().enumerate().any(|(i, &v)| i != h0 && v != 0) {
            return mismatch("sigma is not a multiple of delta_h0");
        }
        if centralizer(self.ctx, sigma)? != decomposition(self.ctx, h0) {
            return mismatch("centralizer differs from D_h0");
        }
        if !self.dominant.contains(&h0) {
            return mismatch("h0 is vertical");
        }
        Ok(Detection { hyperplane: Some(h0), conditions, faithful: self.faithful })
    }
}

pub fn check_conditions(ctx: &Complement, marking: CoordinateMarking, sigma: &[u64]) -> Result<Conditions> {
    LocalTheory::new(ctx, marking)?.conditions(sigma)
}

pub fn detect_hyperplane(ctx: &Complement, marking: CoordinateMarking, sigma: &[u64]) -> Result<Option<usize>> {
    Ok(LocalTheory::new(ctx, marking)?.detect(sigma)?.hyperplane)
}

/// Brute force: compare `Λσ` and `C(σ)` with `I_h`, `D_h` for every `h`,
/// using the per-generator centralizer and the explicit `D_h`.
pub struct Oracle<'a> {
    ctx: &'a Complement,
    inertia: Vec<LambdaSubmodule>,
    decomposition: Vec<LambdaSubmodule>,
}

impl<'a> Oracle<'a> {
    pub fn new(ctx: &'a Complement) -> Self {
        let n = ctx.n();
        Oracle {
            ctx,
            inertia: (0..n).map(|h| crate::nilpotent::inertia(ctx, h)).collect(),
            decomposition: (0..n).map(|h| decomposition(ctx, h)).collect(),
        }
    }

    pub fn scan(&self, sigma: &[u64]) -> Result<Option<usize>> {
        if sigma.len() != self.ctx.n() {
            return Err(Error::DimensionMismatch { expected: self.ctx.n(), found: sigma.len() });
        }
        let line = LambdaSubmodule::from_generators(self.ctx.lambda(), self.ctx.n(), [sigma.to_vec()]);
        let mut cent = None;
        for h in 0..self.ctx.n() {
            if line != self.inertia[h] {
                continue;
            }
            if cent.is_none() {
                cent = Some(centralizer_dense(self.ctx, sigma)?);
            }
            if cent.as_ref() == Some(&self.decomposition[h]) {
                return Ok(Some(h));
            }
        }
        Ok(None)
    }
}

pub fn oracle_scan(ctx: &Complement, sigma: &[u64]) -> Result<Option<usize>> {
    Oracle::new(ctx).scan(sigma)
}

/// For a parallel pair `(h0, h1)` and a dominant `h2` meeting `h0`, vertical
/// `h1'`, `h2'` with `(h0, h2, h1')` and `(h1, h2, h2')` dependent triples.
pub fn vertical_completion(
    ctx: &Complement,
    marking: CoordinateMarking,
    h0: usize,
    h1: usize,
    h2: usize,
) -> Option<(usize, usize)> {
    let arr = ctx.arrangement();
    let ft = arr.flats();
    if !ft.is_parallel(h0, h1) || arr.classify(h2, marking) != Position::Dominant {
        return None;
    }
    let vertical_in = |x: usize, skip: &[usize]| {
        ft.flats[x]
            .iter()
            .map(|&j| j as usize)
            .find(|&j| !skip.contains(&j) && arr.classify(j, marking) == Position::Vertical)
    };
    let a = vertical_in(ft.flat_of_pair(h0, h2)?, &[h0, h2])?;
    let b = vertical_in(ft.flat_of_pair(h1, h2)?, &[h1, h2])?;
    Some((a, b))
}
