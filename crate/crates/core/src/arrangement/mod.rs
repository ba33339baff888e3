mod flats;
mod hyperplane;

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

pub use flats::{FlatTable, PAIR_TABLE_LIMIT};
pub use hyperplane::{is_dependent_triple, is_parallel_pair, Hyperplane};

use crate::algebra::{Fe, Field};
use crate::error::{Error, Result};

/// Default cap on the number of generated hyperplanes.
pub const DEFAULT_SIZE_GUARD: u128 = 20_000;

/// Ordered, duplicate-free list of hyperplanes in `A^n` over a finite field.
#[derive(Debug)]
pub struct Arrangement {
    field: Arc<Field>,
    dim: usize,
    hyperplanes: Vec<Hyperplane>,
    index: HashMap<Hyperplane, usize>,
    fingerprint: u64,
    flats: OnceLock<FlatTable>,
}

/// The coordinate `x_deleted` (1-based) removed, leaving `z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoordinateMarking {
    pub deleted: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Position {
    Vertical,
    Dominant,
}

impl CoordinateMarking {
    pub fn new(dim: usize, deleted: usize) -> Result<Self> {
        if deleted == 0 || deleted > dim {
            return Err(Error::Precondition(format!("coordinate {deleted} outside 1..={dim}")));
        }
        Ok(CoordinateMarking { deleted })
    }

    pub fn classify(&self, h: &Hyperplane) -> Position {
        if h.coeffs()[self.deleted] == 0 {
            Position::Vertical
        } else {
            Position::Dominant
        }
    }

    /// The retained coordinates, 1-based.
    pub fn retained(&self, dim: usize) -> Vec<usize> {
        (1..=dim).filter(|&i| i != self.deleted).collect()
    }
}

/// Number of hyperplanes of `A^n(F_q)`: `q (q^n - 1)/(q - 1)`.
pub fn full_count(q: u128, n: u32) -> u128 {
    q * (q.pow(n) - 1) / (q - 1)
}

impl Arrangement {
    pub fn new(field: Arc<Field>, dim: usize, hyperplanes: Vec<Hyperplane>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Precondition("dimension must be positive".into()));
        }
        let mut index = HashMap::with_capacity(hyperplanes.len());
        for (i, h) in hyperplanes.iter().enumerate() {
            if h.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim + 1, found: h.coeffs().len() });
            }
            if index.insert(h.clone(), i).is_some() {
                return Err(Error::DuplicateHyperplane { index: i });
            }
        }
        let mut hasher = DefaultHasher::new();
        field.spec().modulus.hash(&mut hasher);
        (field.p(), field.m(), dim).hash(&mut hasher);
        hyperplanes.hash(&mut hasher);
        Ok(Arrangement {
            field,
            dim,
            hyperplanes,
            index,
            fingerprint: hasher.finish(),
            flats: OnceLock::new(),
        })
    }

    /// Normalizes raw coefficient rows, rejecting duplicates.
    pub fn from_raw(field: Arc<Field>, dim: usize, raw: &[Vec<Fe>]) -> Result<Self> {
        let hs = raw.iter().map(|r| Hyperplane::normalize(&field, r)).collect::<Result<Vec<_>>>()?;
        Self::new(field, dim, hs)
    }

    /// Every hyperplane of `A^n(F_q)`: grouped by the position of the leading
    /// linear 1, then by the remaining linear coefficients, then the constant.
    pub fn full(field: Arc<Field>, dim: usize) -> Result<Self> {
        Self::full_with_guard(field, dim, DEFAULT_SIZE_GUARD)
    }

    pub fn full_with_guard(field: Arc<Field>, dim: usize, guard: u128) -> Result<Self> {
        let q = field.q() as u128;
        let count = full_count(q, dim as u32);
        if count > guard {
            return Err(Error::SizeGuard { what: "hyperplanes", size: count, limit: guard });
        }
        let mut hs = Vec::with_capacity(count as usize);
        for lead in 1..=dim {
            let tail = dim - lead;
            let combos = (field.q() as usize).pow(tail as u32);
            for code in 0..combos {
                // most significant digit first, so the order is lexicographic
                let mut rest = vec![0; tail];
                let mut c = code;
                for slot in rest.iter_mut().rev() {
                    *slot = (c % field.q() as usize) as Fe;
                    c /= field.q() as usize;
                }
                for a0 in field.elements() {
                    let mut coeffs = vec![0; dim + 1];
                    coeffs[0] = a0;
                    coeffs[lead] = 1;
                    coeffs[lead + 1..].copy_from_slice(&rest);
                    hs.push(Hyperplane::normalize(&field, &coeffs)?);
                }
            }
        }
        Self::new(field, dim, hs)
    }

    /// `H_{x_i - c}`, `H_{x_i - c - 1}` for `c` in `S`, and `H_{x_i - x_j}`,
    /// `H_{x_i - x_j - 1}` for `i < j`, deduplicated in that order.
    pub fn s_configuration(field: Arc<Field>, s: &[Fe], dim: usize) -> Result<Self> {
        if !s.contains(&0) {
            return Err(Error::MissingZeroInS);
        }
        let mut hs: Vec<Hyperplane> = Vec::new();
        let mut push = |h: Hyperplane| {
            if !hs.contains(&h) {
                hs.push(h);
            }
        };
        for i in 1..=dim {
            for &c in s {
                push(Hyperplane::coordinate(&field, dim, i, c));
                push(Hyperplane::coordinate(&field, dim, i, field.add(c, 1)));
            }
        }
        for i in 1..=dim {
            for j in i + 1..=dim {
                push(Hyperplane::difference(&field, dim, i, j, 0));
                push(Hyperplane::difference(&field, dim, i, j, 1));
            }
        }
        Self::new(field, dim, hs)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn field_arc(&self) -> Arc<Field> {
        self.field.clone()
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn len(&self) -> usize {
        self.hyperplanes.len()
    }
    pub fn is_empty(&self) -> bool {
        self.hyperplanes.is_empty()
    }
    pub fn hyperplanes(&self) -> &[Hyperplane] {
        &self.hyperplanes
    }
    pub fn get(&self, i: usize) -> &Hyperplane {
        &self.hyperplanes[i]
    }
    pub fn index_of(&self, h: &Hyperplane) -> Option<usize> {
        self.index.get(h).copied()
    }

    /// Index of the hyperplane with the given raw (unnormalized) coefficients.
    pub fn find(&self, raw: &[Fe]) -> Result<usize> {
        let h = Hyperplane::normalize(&self.field, raw)?;
        self.index_of(&h).ok_or_else(|| Error::NotInArrangement(h.format(&self.field)))
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// True when every hyperplane of `A^n(F_q)` is present.
    pub fn is_full(&self) -> bool {
        self.len() as u128 == full_count(self.field.q() as u128, self.dim as u32)
    }

    pub fn flats(&self) -> &FlatTable {
        self.flats.get_or_init(|| FlatTable::build(&self.field, &self.hyperplanes))
    }

    pub fn is_parallel(&self, i: usize, j: usize) -> bool {
        i != j && self.hyperplanes[i].linear() == self.hyperplanes[j].linear()
    }

    pub fn is_dependent(&self, i: usize, j: usize, k: usize) -> bool {
        self.flats().is_dependent(i, j, k)
    }

    pub fn sub_arrangement(&self, indices: &[usize]) -> Result<Self> {
        Self::new(self.field.clone(), self.dim, indices.iter().map(|&i| self.hyperplanes[i].clone()).collect())
    }

    pub fn classify(&self, i: usize, marking: CoordinateMarking) -> Position {
        marking.classify(&self.hyperplanes[i])
    }

    /// Hyperplanes whose equation only involves the coordinates in `coords` (1-based).
    pub fn supported_in(&self, coords: &[usize]) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| {
                let c = self.hyperplanes[i].coeffs();
                (1..=self.dim).all(|t| c[t] == 0 || coords.contains(&t))
            })
            .collect()
    }

    /// Projection along the marking: target hyperplanes are the vertical ones
    /// with the deleted coordinate dropped.
    pub fn projection(&self, marking: CoordinateMarking) -> Result<Projection> {
        if self.dim < 2 {
            return Err(Error::Precondition("projection needs dimension at least 2".into()));
        }
        CoordinateMarking::new(self.dim, marking.deleted)?;
        let mut hs = Vec::new();
        let mut source = Vec::new();
        for (i, h) in self.hyperplanes.iter().enumerate() {
            if marking.classify(h) == Position::Vertical {
                let mut c = h.coeffs().to_vec();
                c.remove(marking.deleted);
                hs.push(Hyperplane::normalize(&self.field, &c)?);
                source.push(i);
            }
        }
        let target = Arc::new(Arrangement::new(self.field.clone(), self.dim - 1, hs)?);
        Ok(Projection { marking, target, source })
    }

    /// The arrangement induced on hyperplane `h`: one hyperplane of `h` per
    /// flat through `h`, in flat order.
    pub fn induced(&self, h: usize) -> Result<InducedArrangement> {
        if self.dim < 2 {
            return Err(Error::Precondition("induced arrangement needs dimension at least 2".into()));
        }
        let f = &self.field;
        let base = self.hyperplanes[h].coeffs();
        let lead = (1..=self.dim).find(|&i| base[i] != 0).expect("normalized");
        let ft = self.flats();
        let mut hs = Vec::new();
        let mut flat_ids = Vec::new();
        for &x in &ft.flats_of[h] {
            let other = *ft.flats[x as usize].iter().find(|&&j| j as usize != h).expect("size >= 2") as usize;
            let b = self.hyperplanes[other].coeffs();
            // substitute x_lead = -(a0 + sum_{i != lead} a_i x_i)
            let mut c: Vec<Fe> = (0..=self.dim).map(|i| f.sub(b[i], f.mul(b[lead], base[i]))).collect();
            c.remove(lead);
            hs.push(Hyperplane::normalize(f, &c)?);
            flat_ids.push(x as usize);
        }
        let arrangement = Arc::new(Arrangement::new(f.clone(), self.dim - 1, hs)?);
        Ok(InducedArrangement { hyperplane: h, arrangement, flat_ids })
    }
}

/// The arrangement of `A^{n-1}_z` seen through a coordinate projection.
#[derive(Debug, Clone)]
pub struct Projection {
    pub marking: CoordinateMarking,
    pub target: Arc<Arrangement>,
    /// target index -> index of its pullback in the source
    pub source: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct InducedArrangement {
    pub hyperplane: usize,
    pub arrangement: Arc<Arrangement>,
    /// induced index -> flat of the source through `hyperplane`
    pub flat_ids: Vec<usize>,
}

impl InducedArrangement {
    /// Induced index of `h ∩ h'`, or `None` when `h'` is parallel to (or is) `h`.
    pub fn index_of_source(&self, parent: &Arrangement, other: usize) -> Option<usize> {
        let x = parent.flats().flat_of_pair(self.hyperplane, other)?;
        self.flat_ids.binary_search(&x).ok()
    }
}
