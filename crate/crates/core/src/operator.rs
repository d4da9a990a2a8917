//! Sparse operators on the `2^L`-dimensional configuration space.
//!
//! Basis convention, used everywhere in the crate: site `j` (1-based) is bit
//! `j − 1` of the basis index, hole = 0 and particle = 1. Site 1 is the least
//! significant bit.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::{Residual, Scalar};

/// Largest lattice the crate will build operators for.
pub const MAX_SITES: usize = 16;

/// Occupancy word of an `L`-site lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    bits: u32,
    sites: usize,
}

impl Configuration {
    pub fn new(bits: u32, sites: usize) -> Result<Self> {
        check_sites(sites)?;
        if sites < 32 && bits >> sites != 0 {
            return Err(Error::Domain(format!(
                "occupancy word {bits:#b} has bits above site {sites}"
            )));
        }
        Ok(Self { bits, sites })
    }

    pub fn empty(sites: usize) -> Result<Self> {
        Self::new(0, sites)
    }

    /// From per-site occupancies, site 1 first.
    pub fn from_occupancies(occ: &[bool]) -> Result<Self> {
        let bits = occ
            .iter()
            .enumerate()
            .fold(0u32, |b, (i, &o)| b | (u32::from(o) << i));
        Self::new(bits, occ.len())
    }

    /// Parses a word such as `"0110"`, site 1 first.
    pub fn parse(word: &str) -> Result<Self> {
        let occ = word
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Parse(format!("configuration word {word:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_occupancies(&occ)
    }

    pub fn index(&self) -> usize {
        self.bits as usize
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    /// Occupancy of 1-based `site`.
    pub fn occupied(&self, site: usize) -> bool {
        debug_assert!((1..=self.sites).contains(&site));
        self.bits >> (site - 1) & 1 == 1
    }

    pub fn with_flipped(&self, site: usize) -> Self {
        Self {
            bits: self.bits ^ (1 << (site - 1)),
            sites: self.sites,
        }
    }

    pub fn particle_count(&self) -> u32 {
        self.bits.count_ones()
    }

    /// `Σ_j j·η_j`.
    pub fn position_sum(&self) -> i64 {
        (1..=self.sites)
            .filter(|&j| self.occupied(j))
            .map(|j| j as i64)
            .sum()
    }

    /// All `2^L` configurations in basis order.
    pub fn all(sites: usize) -> impl Iterator<Item = Configuration> {
        (0..1u32 << sites).map(move |bits| Configuration { bits, sites })
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 1..=self.sites {
            f.write_str(if self.occupied(j) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

fn check_sites(sites: usize) -> Result<()> {
    if sites == 0 || sites > MAX_SITES {
        return Err(Error::Domain(format!(
            "lattice size must be in 1..={MAX_SITES}, got {sites}"
        )));
    }
    Ok(())
}

/// Number of sites for a lattice with `dim` basis states.
pub fn sites_for_dim(dim: usize) -> Option<usize> {
    (dim.is_power_of_two() && dim >= 2).then(|| dim.trailing_zeros() as usize)
}

/// 2×2 one-site matrix in the (hole, particle) basis.
#[derive(Clone, Debug, PartialEq)]
pub struct SiteMatrix<S> {
    entries: [[S; 2]; 2],
}

impl<S: Scalar> SiteMatrix<S> {
    pub fn new(entries: [[S; 2]; 2]) -> Self {
        Self { entries }
    }

    pub fn get(&self, row: usize, col: usize) -> &S {
        &self.entries[row][col]
    }

    pub fn diag(a: S, b: S) -> Self {
        Self::new([[a, S::zero()], [S::zero(), b]])
    }

    pub fn identity() -> Self {
        Self::diag(S::one(), S::one())
    }

    pub fn zero() -> Self {
        Self::diag(S::zero(), S::zero())
    }

    /// σ⁺: particle → hole (annihilation).
    pub fn sigma_plus() -> Self {
        Self::new([[S::zero(), S::one()], [S::zero(), S::zero()]])
    }

    /// σ⁻: hole → particle (creation).
    pub fn sigma_minus() -> Self {
        Self::new([[S::zero(), S::zero()], [S::one(), S::zero()]])
    }

    /// n = (1 − σᶻ)/2.
    pub fn number() -> Self {
        Self::diag(S::zero(), S::one())
    }

    /// 1 − n.
    pub fn vacancy() -> Self {
        Self::diag(S::one(), S::zero())
    }

    pub fn sigma_x() -> Self {
        Self::new([[S::zero(), S::one()], [S::one(), S::zero()]])
    }

    pub fn sigma_z() -> Self {
        Self::diag(S::one(), S::one().neg_ref())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let e = |r: usize, c: usize| {
            self.entries[r][0]
                .mul_ref(&rhs.entries[0][c])
                .add_ref(&self.entries[r][1].mul_ref(&rhs.entries[1][c]))
        };
        Self::new([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let e = |r: usize, c: usize| self.entries[r][c].add_ref(&rhs.entries[r][c]);
        Self::new([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let e = |r: usize, c: usize| self.entries[r][c].sub_ref(&rhs.entries[r][c]);
        Self::new([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }

    pub fn scale(&self, c: &S) -> Self {
        let e = |r: usize, k: usize| self.entries[r][k].mul_ref(c);
        Self::new([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }

    pub fn transpose(&self) -> Self {
        let e = |r: usize, c: usize| self.entries[c][r].clone();
        Self::new([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::identity(), |acc, _| acc.mul(self))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(Scalar::is_zero)
    }

    pub fn approx_eq(&self, rhs: &Self) -> bool {
        self.entries
            .iter()
            .flatten()
            .zip(rhs.entries.iter().flatten())
            .all(|(a, b)| a.approx_eq(b))
    }

    pub fn to_operator(&self) -> Operator<S> {
        Operator::from_entries(
            2,
            (0..2).flat_map(|r| (0..2).map(move |c| (r, c, self.entries[r][c].clone()))),
        )
        .expect("2x2 entries are in range")
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> SiteMatrix<T> {
        let e = |r: usize, c: usize| f(&self.entries[r][c]);
        SiteMatrix::new([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }

    pub fn residual(&self, rhs: &Self) -> Residual {
        let diff = self.sub(rhs);
        S::residual(diff.entries.iter().flatten())
    }
}

/// Square sparse matrix, row-major, no stored zeros, columns sorted within a
/// row. Iteration order is deterministic.
#[derive(Clone, PartialEq)]
pub struct Operator<S> {
    dim: usize,
    rows: Vec<Vec<(usize, S)>>,
}

/// Outcome of [`Operator::identity_multiple`].
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityMultiple<S> {
    pub is_multiple: bool,
    /// The common diagonal value when `is_multiple`.
    pub constant: Option<S>,
    /// Residual over the off-diagonal entries.
    pub offdiag_residual: Residual,
    /// Residual of `diag − diag[0]`, i.e. how unequal the diagonal is.
    pub diagonal_spread: Residual,
}

impl<S: Scalar> Operator<S> {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            rows: vec![Vec::new(); dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal((0..dim).map(|_| S::one()).collect())
    }

    pub fn diagonal(values: Vec<S>) -> Self {
        let dim = values.len();
        let rows = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                if v.is_zero() {
                    Vec::new()
                } else {
                    vec![(i, v)]
                }
            })
            .collect();
        Self { dim, rows }
    }

    /// Sums repeated `(row, col)` entries and drops zeros.
    pub fn from_entries<I>(dim: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, S)>,
    {
        let mut rows: Vec<std::collections::BTreeMap<usize, S>> = vec![Default::default(); dim];
        for (r, c, v) in entries {
            if r >= dim || c >= dim {
                return Err(Error::Domain(format!(
                    "entry ({r}, {c}) outside a {dim}x{dim} operator"
                )));
            }
            rows[r]
                .entry(c)
                .and_modify(|acc| acc.add_assign_ref(&v))
                .or_insert(v);
        }
        Ok(Self {
            dim,
            rows: rows
                .into_iter()
                .map(|row| row.into_iter().filter(|(_, v)| !v.is_zero()).collect())
                .collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sites(&self) -> Option<usize> {
        sites_for_dim(self.dim)
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(Vec::is_empty)
    }

    pub fn get(&self, row: usize, col: usize) -> S {
        self.rows[row]
            .binary_search_by_key(&col, |(c, _)| *c)
            .map(|i| self.rows[row][i].1.clone())
            .unwrap_or_else(|_| S::zero())
    }

    /// Nonzero entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &S)> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |(c, v)| (r, *c, v)))
    }

    pub fn row(&self, r: usize) -> &[(usize, S)] {
        &self.rows[r]
    }

    fn check_dim(&self, rhs: &Self) -> Result<()> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: rhs.dim,
            });
        }
        Ok(())
    }

    fn merge(&self, rhs: &Self, combine: impl Fn(Option<&S>, Option<&S>) -> S + Sync) -> Self {
        let rows = self
            .rows
            .iter()
            .zip(&rhs.rows)
            .map(|(a, b)| {
                let mut out = Vec::with_capacity(a.len().max(b.len()));
                let (mut i, mut j) = (0, 0);
                while i < a.len() || j < b.len() {
                    let (col, v) = match (a.get(i), b.get(j)) {
                        (Some((ca, va)), Some((cb, _))) if ca < cb => {
                            i += 1;
                            (*ca, combine(Some(va), None))
                        }
                        (Some((ca, _)), Some((cb, vb))) if cb < ca => {
                            j += 1;
                            (*cb, combine(None, Some(vb)))
                        }
                        (Some((ca, va)), Some((_, vb))) => {
                            i += 1;
                            j += 1;
                            (*ca, combine(Some(va), Some(vb)))
                        }
                        (Some((ca, va)), None) => {
                            i += 1;
                            (*ca, combine(Some(va), None))
                        }
                        (None, Some((cb, vb))) => {
                            j += 1;
                            (*cb, combine(None, Some(vb)))
                        }
                        (None, None) => unreachable!(),
                    };
                    if !v.is_zero() {
                        out.push((col, v));
                    }
                }
                out
            })
            .collect();
        Self {
            dim: self.dim,
            rows,
        }
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_dim(rhs)?;
        Ok(self.merge(rhs, |a, b| match (a, b) {
            (Some(a), Some(b)) => a.add_ref(b),
            (Some(a), None) | (None, Some(a)) => a.clone(),
            (None, None) => S::zero(),
        }))
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.check_dim(rhs)?;
        Ok(self.merge(rhs, |a, b| match (a, b) {
            (Some(a), Some(b)) => a.sub_ref(b),
            (Some(a), None) => a.clone(),
            (None, Some(b)) => b.neg_ref(),
            (None, None) => S::zero(),
        }))
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        self.check_dim(rhs)?;
        let dim = self.dim;
        let rows = self
            .rows
            .par_iter()
            .map(|row| {
                let mut acc: Vec<Option<S>> = vec![None; dim];
                let mut touched = Vec::new();
                for (k, a) in row {
                    for (j, b) in &rhs.rows[*k] {
                        let p = a.mul_ref(b);
                        match &mut acc[*j] {
                            Some(v) => v.add_assign_ref(&p),
                            slot @ None => {
                                touched.push(*j);
                                *slot = Some(p);
                            }
                        }
                    }
                }
                touched.sort_unstable();
                touched
                    .into_iter()
                    .filter_map(|j| acc[j].take().filter(|v| !v.is_zero()).map(|v| (j, v)))
                    .collect()
            })
            .collect();
        Ok(Self { dim, rows })
    }

    pub fn scale(&self, c: &S) -> Self {
        Self {
            dim: self.dim,
            rows: self
                .rows
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|(j, v)| (*j, v.mul_ref(c)))
                        .filter(|(_, v)| !v.is_zero())
                        .collect()
                })
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&S::one().neg_ref())
    }

    pub fn transpose(&self) -> Self {
        let mut rows: Vec<Vec<(usize, S)>> = vec![Vec::new(); self.dim];
        // Row-major traversal pushes columns of the transpose in sorted order.
        for (r, c, v) in self.entries() {
            rows[c].push((r, v.clone()));
        }
        Self {
            dim: self.dim,
            rows,
        }
    }

    /// `AB − BA`.
    pub fn commutator(&self, rhs: &Self) -> Result<Self> {
        self.mul(rhs)?.sub(&rhs.mul(self)?)
    }

    /// `self^n` by repeated multiplication; `n = 0` gives the identity.
    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::identity(self.dim);
        for _ in 0..n {
            acc = acc.mul(self).expect("same dimension");
        }
        acc
    }

    /// Standard Kronecker product `self ⊗ rhs`; `self` indexes the more
    /// significant bits.
    pub fn kron(&self, rhs: &Self) -> Self {
        let dim = self.dim * rhs.dim;
        let mut rows = Vec::with_capacity(dim);
        for arow in &self.rows {
            for brow in &rhs.rows {
                let mut out = Vec::with_capacity(arow.len() * brow.len());
                for (ja, va) in arow {
                    for (jb, vb) in brow {
                        let v = va.mul_ref(vb);
                        if !v.is_zero() {
                            out.push((ja * rhs.dim + jb, v));
                        }
                    }
                }
                rows.push(out);
            }
        }
        Self { dim, rows }
    }

    /// Tensor product of per-site factors, `factors[0]` acting on site 1.
    pub fn embed_chain(factors: &[SiteMatrix<S>]) -> Result<Self> {
        let (first, rest) = factors
            .split_first()
            .ok_or_else(|| Error::Domain("embed_chain needs at least one site".into()))?;
        check_sites(factors.len())?;
        // Higher sites are more significant, so they go on the left of kron.
        Ok(rest
            .iter()
            .fold(first.to_operator(), |acc, f| f.to_operator().kron(&acc)))
    }

    /// `m` acting on 1-based `site` of an `sites`-site lattice.
    pub fn embed_site(sites: usize, site: usize, m: &SiteMatrix<S>) -> Result<Self> {
        if site == 0 || site > sites {
            return Err(Error::Domain(format!("site {site} outside 1..={sites}")));
        }
        let factors: Vec<_> = (1..=sites)
            .map(|j| {
                if j == site {
                    m.clone()
                } else {
                    SiteMatrix::identity()
                }
            })
            .collect();
        Self::embed_chain(&factors)
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Operator<T> {
        Operator {
            dim: self.dim,
            rows: self
                .rows
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|(j, v)| (*j, f(v)))
                        .filter(|(_, v)| !v.is_zero())
                        .collect()
                })
                .collect(),
        }
    }

    pub fn try_map<T: Scalar>(&self, f: impl Fn(&S) -> Result<T>) -> Result<Operator<T>> {
        let mut rows = Vec::with_capacity(self.dim);
        for row in &self.rows {
            let mut out = Vec::with_capacity(row.len());
            for (j, v) in row {
                let v = f(v)?;
                if !v.is_zero() {
                    out.push((*j, v));
                }
            }
            rows.push(out);
        }
        Ok(Operator {
            dim: self.dim,
            rows,
        })
    }

    /// Residual of `self` viewed as a difference that should vanish.
    pub fn residual(&self) -> Residual {
        S::residual(self.rows.iter().flatten().map(|(_, v)| v))
    }

    /// `self − rhs` as a residual.
    pub fn residual_against(&self, rhs: &Self) -> Result<Residual> {
        Ok(self.sub(rhs)?.residual())
    }

    pub fn column_sums(&self) -> Vec<S> {
        let mut sums = vec![S::zero(); self.dim];
        for (_, c, v) in self.entries() {
            sums[c].add_assign_ref(v);
        }
        sums
    }

    pub fn diagonal_values(&self) -> Vec<S> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    /// Decides whether the operator is `c·I` and extracts `c`.
    pub fn identity_multiple(&self) -> IdentityMultiple<S> {
        let offdiag = S::residual(self.entries().filter(|(r, c, _)| r != c).map(|(_, _, v)| v));
        let diag = self.diagonal_values();
        let spread: Vec<S> = diag.iter().map(|d| d.sub_ref(&diag[0])).collect();
        let spread = S::residual(spread.iter());
        let offdiag_zero = self.entries().all(|(r, c, _)| r == c);
        let diag_equal = diag.iter().all(|d| d == &diag[0]);
        let is_multiple = if S::EXACT {
            offdiag_zero && diag_equal
        } else {
            offdiag.passes(1e-10) && spread.passes(1e-10)
        };
        IdentityMultiple {
            is_multiple,
            constant: is_multiple.then(|| diag[0].clone()),
            offdiag_residual: offdiag,
            diagonal_spread: spread,
        }
    }

    pub fn is_diagonal(&self) -> bool {
        self.entries().all(|(r, c, _)| r == c)
    }
}

impl Operator<f64> {
    /// Max-abs entry.
    pub fn max_abs_entry(&self) -> f64 {
        self.rows
            .iter()
            .flatten()
            .fold(0.0, |m, (_, v)| m.max(v.abs()))
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.entries() {
            m[(r, c)] = *v;
        }
        m
    }

    pub fn from_dense(m: &nalgebra::DMatrix<f64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "operator must be square");
        let dim = m.nrows();
        let rows = (0..dim)
            .map(|r| {
                (0..dim)
                    .filter(|&c| m[(r, c)] != 0.0)
                    .map(|c| (c, m[(r, c)]))
                    .collect()
            })
            .collect();
        Self { dim, rows }
    }
}

impl<S: Scalar + fmt::Display> fmt::Debug for Operator<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Operator(dim = {}, nnz = {})", self.dim, self.nnz())?;
        for (r, c, v) in self.entries() {
            writeln!(f, "  ({r}, {c}) = {v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rational, LaurentScalar};

    type L = LaurentScalar;

    fn lit(n: i64) -> L {
        L::from(n)
    }

    #[test]
    fn configuration_indexing() {
        let c = Configuration::parse("110").unwrap();
        assert_eq!(c.index(), 0b011);
        assert!(c.occupied(1) && c.occupied(2) && !c.occupied(3));
        assert_eq!(c.position_sum(), 3);
        assert_eq!(c.to_string(), "110");
        assert!(Configuration::new(0b100, 2).is_err());
        assert!(Configuration::new(0, 0).is_err());
        assert_eq!(Configuration::all(3).count(), 8);
    }

    #[test]
    fn embed_identity_chain() {
        let id =
            Operator::<L>::embed_chain(&[SiteMatrix::identity(), SiteMatrix::identity()]).unwrap();
        assert_eq!(id, Operator::identity(4));
    }

    #[test]
    fn embed_number_operator() {
        let n = Operator::<L>::embed_chain(&[SiteMatrix::number()]).unwrap();
        assert_eq!(n, Operator::diagonal(vec![lit(0), lit(1)]));
        let nn = Operator::<L>::embed_chain(&[SiteMatrix::number(), SiteMatrix::number()]).unwrap();
        assert_eq!(nn, Operator::diagonal(vec![lit(0), lit(0), lit(0), lit(1)]));
    }

    #[test]
    fn embed_site_matches_subscript_convention() {
        // σ⁻ at site 2 of a 2-site lattice creates a particle in bit 1.
        let op = Operator::<L>::embed_site(2, 2, &SiteMatrix::sigma_minus()).unwrap();
        assert_eq!(op.get(0b10, 0b00), lit(1));
        assert_eq!(op.get(0b11, 0b01), lit(1));
        assert_eq!(op.nnz(), 2);
    }

    #[test]
    fn embed_chain_rejects_empty() {
        assert!(matches!(
            Operator::<L>::embed_chain(&[]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn involution_squares_to_identity() {
        let pi =
            Operator::<L>::embed_chain(&[SiteMatrix::sigma_x(), SiteMatrix::sigma_x()]).unwrap();
        assert_eq!(pi.mul(&pi).unwrap(), Operator::identity(4));
    }

    #[test]
    fn transpose_of_diagonal() {
        let d = Operator::diagonal(vec![lit(2), L::tau()]);
        assert_eq!(d.transpose(), d);
    }

    #[test]
    fn sigma_plus_times_sigma_minus() {
        let sp = Operator::<L>::embed_site(1, 1, &SiteMatrix::sigma_plus()).unwrap();
        let sm = Operator::<L>::embed_site(1, 1, &SiteMatrix::sigma_minus()).unwrap();
        assert_eq!(
            sp.mul(&sm).unwrap(),
            Operator::diagonal(vec![lit(1), lit(0)])
        );
    }

    #[test]
    fn commutator_examples() {
        let a = Operator::diagonal(vec![lit(1), L::tau()]);
        assert!(a.commutator(&a).unwrap().is_zero());
        let b = Operator::diagonal(vec![lit(3), lit(-2)]);
        assert!(a.commutator(&b).unwrap().is_zero());
        let sp = Operator::<L>::embed_site(1, 1, &SiteMatrix::sigma_plus()).unwrap();
        let sm = Operator::<L>::embed_site(1, 1, &SiteMatrix::sigma_minus()).unwrap();
        assert_eq!(
            sp.commutator(&sm).unwrap(),
            Operator::diagonal(vec![lit(1), lit(-1)])
        );
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = Operator::<L>::identity(2);
        let b = Operator::<L>::identity(4);
        assert_eq!(
            a.add(&b).unwrap_err(),
            Error::DimensionMismatch { left: 2, right: 4 }
        );
        assert!(a.mul(&b).is_err());
        assert!(a.commutator(&b).is_err());
    }

    #[test]
    fn identity_multiple_detection() {
        let three = Operator::<L>::identity(4).scale(&lit(3));
        let res = three.identity_multiple();
        assert!(res.is_multiple);
        assert_eq!(res.constant, Some(lit(3)));
        assert_eq!(res.offdiag_residual, Residual::exact_zero());

        let d = Operator::diagonal(vec![lit(1), lit(2)]);
        let res = d.identity_multiple();
        assert!(!res.is_multiple);
        assert_eq!(res.constant, None);
    }

    #[test]
    fn max_abs_entry_examples() {
        assert_eq!(Operator::<f64>::zero(8).max_abs_entry(), 0.0);
        assert_eq!(Operator::<f64>::identity(8).max_abs_entry(), 1.0);
        let m = Operator::from_entries(2, [(0, 1, -3.5), (1, 0, 2.0)]).unwrap();
        assert_eq!(m.max_abs_entry(), 3.5);
    }

    #[test]
    fn from_entries_sums_and_drops_zeros() {
        let m =
            Operator::from_entries(2, [(0, 0, lit(1)), (0, 0, lit(-1)), (1, 0, lit(2))]).unwrap();
        assert_eq!(m.nnz(), 1);
        assert!(Operator::from_entries(2, [(2, 0, lit(1))]).is_err());
    }

    #[test]
    fn kron_is_standard() {
        // kron(A, B) puts A on the more significant bit.
        let a = Operator::<L>::embed_site(1, 1, &SiteMatrix::number()).unwrap();
        let b = Operator::<L>::identity(2);
        let k = a.kron(&b);
        assert_eq!(
            k,
            Operator::embed_site(2, 2, &SiteMatrix::number()).unwrap()
        );
    }

    #[test]
    fn site_matrix_algebra() {
        let sp = SiteMatrix::<L>::sigma_plus();
        let sm = SiteMatrix::<L>::sigma_minus();
        assert_eq!(sp.mul(&sm), SiteMatrix::vacancy());
        assert_eq!(sp.transpose(), sm);
        assert_eq!(
            SiteMatrix::<L>::sigma_z(),
            SiteMatrix::identity().sub(&SiteMatrix::number().scale(&lit(2)))
        );
        let half = SiteMatrix::<L>::identity().scale(&L::from(rational(1, 2)));
        assert_eq!(
            half.pow(2),
            SiteMatrix::identity().scale(&L::from(rational(1, 4)))
        );
    }
}
