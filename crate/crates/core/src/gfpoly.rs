//! Polynomials over a prime field and dense linear algebra on graded pieces.
//!
//! Monomials are packed into a `u128`, four bits per variable with x0 in the top
//! nibble, so numeric order on a fixed degree is lexicographic order.

use crate::error::{pre, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

pub const MAX_VARS: usize = 32;
pub const MAX_DEGREE: i64 = 15;

#[derive(Clone)]
pub struct PrimeField {
    p: u32,
    inv: Arc<Vec<u32>>,
}

impl fmt::Debug for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.p)
    }
}

impl PartialEq for PrimeField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
    }
}

impl Default for PrimeField {
    fn default() -> Self {
        PrimeField::new(101).expect("101 is prime")
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p as u64 {
        if (p as u64).is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self> {
        if p <= 2 || p >= 1 << 31 || !is_prime(p) {
            return Err(pre(format!("field size {p} must be an odd prime below 2^31")));
        }
        let inv = if p < 1 << 16 {
            let mut inv = vec![0u32; p as usize];
            inv[1] = 1;
            for a in 2..p as u64 {
                // inv(a) = -(p / a) * inv(p mod a)
                inv[a as usize] = ((p as u64 - (p as u64 / a)) * inv[(p as u64 % a) as usize] as u64 % p as u64) as u32;
            }
            inv
        } else {
            Vec::new()
        };
        Ok(PrimeField { p, inv: Arc::new(inv) })
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p { s - self.p } else { s }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b { a - b } else { a + self.p - b }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 { 0 } else { self.p - a }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero");
        if !self.inv.is_empty() {
            return self.inv[a as usize];
        }
        self.pow(a, self.p - 2)
    }

    pub fn pow(&self, mut a: u32, mut e: u32) -> u32 {
        let mut r = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    pub fn from_i64(&self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }

    /// Symmetric representative in (−p/2, p/2].
    pub fn to_i64(&self, v: u32) -> i64 {
        if v > self.p / 2 { v as i64 - self.p as i64 } else { v as i64 }
    }
}

pub type Mono = u128;

#[inline]
fn shift(var: usize) -> u32 {
    (124 - 4 * var) as u32
}

pub fn mono_var(var: usize) -> Mono {
    1u128 << shift(var)
}

pub fn mono_from_exps(exps: &[u32]) -> Mono {
    assert!(exps.len() <= MAX_VARS);
    exps.iter().enumerate().fold(0, |m, (i, &e)| {
        assert!(e < 16, "exponent too large");
        m | (e as u128) << shift(i)
    })
}

#[inline]
pub fn mono_exp(m: Mono, var: usize) -> u32 {
    ((m >> shift(var)) & 0xf) as u32
}

pub fn mono_exps(m: Mono, nvars: usize) -> Vec<u32> {
    (0..nvars).map(|i| mono_exp(m, i)).collect()
}

pub fn mono_deg(m: Mono) -> i64 {
    let mut m = m;
    let mut d = 0;
    while m != 0 {
        d += (m & 0xf) as i64;
        m >>= 4;
    }
    d
}

#[inline]
pub fn mono_mul(a: Mono, b: Mono) -> Mono {
    debug_assert!(mono_deg(a) + mono_deg(b) <= MAX_DEGREE);
    a + b
}

/// All monomials of degree d in n+1 variables, in descending lexicographic order.
pub fn monomials(n: usize, d: i64) -> Vec<Mono> {
    let nvars = n + 1;
    assert!(nvars <= MAX_VARS && d <= MAX_DEGREE, "monomial packing limits exceeded");
    let mut out = Vec::new();
    if d < 0 {
        return out;
    }
    let mut exps = vec![0u32; nvars];
    fn rec(i: usize, left: u32, exps: &mut Vec<u32>, out: &mut Vec<Mono>) {
        if i + 1 == exps.len() {
            exps[i] = left;
            out.push(mono_from_exps(exps));
            return;
        }
        for e in (0..=left).rev() {
            exps[i] = e;
            rec(i + 1, left - e, exps, out);
        }
        exps[i] = 0;
    }
    rec(0, d as u32, &mut exps, &mut out);
    out
}

/// Sparse polynomial; terms sorted by descending monomial, no zero coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly {
    pub nvars: usize,
    pub terms: Vec<(Mono, u32)>,
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, &(m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let vars: Vec<String> = (0..self.nvars)
                .filter_map(|i| match mono_exp(m, i) {
                    0 => None,
                    1 => Some(format!("x{i}")),
                    e => Some(format!("x{i}^{e}")),
                })
                .collect();
            match (c, vars.is_empty()) {
                (_, true) => write!(f, "{c}")?,
                (1, false) => write!(f, "{}", vars.join("*"))?,
                _ => write!(f, "{c}*{}", vars.join("*"))?,
            }
        }
        Ok(())
    }
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly { nvars, terms: Vec::new() }
    }

    pub fn constant(nvars: usize, c: u32) -> Self {
        let terms = if c == 0 { Vec::new() } else { vec![(0, c)] };
        MultiPoly { nvars, terms }
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        MultiPoly { nvars, terms: vec![(mono_var(i), 1)] }
    }

    pub fn monomial(nvars: usize, m: Mono, c: u32) -> Self {
        let terms = if c == 0 { Vec::new() } else { vec![(m, c)] };
        MultiPoly { nvars, terms }
    }

    /// Collects terms, summing duplicates and dropping zeros.
    pub fn from_terms(f: &PrimeField, nvars: usize, terms: impl IntoIterator<Item = (Mono, u32)>) -> Self {
        let mut acc: HashMap<Mono, u32> = HashMap::new();
        for (m, c) in terms {
            let e = acc.entry(m).or_insert(0);
            *e = f.add(*e, c % f.p());
        }
        let mut terms: Vec<(Mono, u32)> = acc.into_iter().filter(|&(_, c)| c != 0).collect();
        terms.sort_unstable_by_key(|x| std::cmp::Reverse(x.0));
        MultiPoly { nvars, terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<i64> {
        self.terms.iter().map(|&(m, _)| mono_deg(m)).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut it = self.terms.iter().map(|&(m, _)| mono_deg(m));
        match it.next() {
            None => true,
            Some(d) => it.all(|e| e == d),
        }
    }

    pub fn add(&self, f: &PrimeField, o: &MultiPoly) -> MultiPoly {
        MultiPoly::from_terms(f, self.nvars, self.terms.iter().chain(&o.terms).copied())
    }

    pub fn sub(&self, f: &PrimeField, o: &MultiPoly) -> MultiPoly {
        self.add(f, &o.scale(f, f.p() - 1))
    }

    pub fn scale(&self, f: &PrimeField, c: u32) -> MultiPoly {
        if c.is_multiple_of(f.p()) {
            return MultiPoly::zero(self.nvars);
        }
        MultiPoly { nvars: self.nvars, terms: self.terms.iter().map(|&(m, x)| (m, f.mul(x, c))).collect() }
    }

    pub fn mul(&self, f: &PrimeField, o: &MultiPoly) -> MultiPoly {
        let prods = self.terms.iter().flat_map(|&(m1, c1)| o.terms.iter().map(move |&(m2, c2)| (mono_mul(m1, m2), f.mul(c1, c2))));
        MultiPoly::from_terms(f, self.nvars, prods)
    }

    pub fn mul_mono(&self, f: &PrimeField, m: Mono, c: u32) -> MultiPoly {
        MultiPoly { nvars: self.nvars, terms: self.terms.iter().map(|&(x, y)| (mono_mul(x, m), f.mul(y, c))).collect() }
    }

    pub fn pow(&self, f: &PrimeField, e: u32) -> MultiPoly {
        let mut r = MultiPoly::constant(self.nvars, 1);
        for _ in 0..e {
            r = r.mul(f, self);
        }
        r
    }

    /// Substitutes x_i ↦ forms[i]; the result lives in the ring of the forms.
    pub fn substitute(&self, f: &PrimeField, forms: &[MultiPoly]) -> MultiPoly {
        assert_eq!(forms.len(), self.nvars);
        let nv = forms.first().map_or(0, |p| p.nvars);
        let mut out = MultiPoly::zero(nv);
        for &(m, c) in &self.terms {
            let mut t = MultiPoly::constant(nv, c);
            for (i, e) in mono_exps(m, self.nvars).into_iter().enumerate() {
                if e > 0 {
                    t = t.mul(f, &forms[i].pow(f, e));
                }
            }
            out = out.add(f, &t);
        }
        out
    }
}

/// Dense homogeneous polynomial of the given degree with nonzero coefficients
/// drawn from ChaCha8 seeded by `seed`.
pub fn random_homogeneous(f: &PrimeField, degree: i64, n: usize, seed: u64) -> MultiPoly {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_homogeneous_with(f, degree, n, &mut rng)
}

pub fn random_homogeneous_with(f: &PrimeField, degree: i64, n: usize, rng: &mut impl Rng) -> MultiPoly {
    let terms: Vec<(Mono, u32)> = monomials(n, degree).into_iter().map(|m| (m, rng.gen_range(1..f.p()))).collect();
    MultiPoly { nvars: n + 1, terms }
}

/// Dense matrix over F_p, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u32>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u32>], cols: usize) -> Self {
        let mut m = Mat::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            m.data[i * cols..(i + 1) * cols].copy_from_slice(r);
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, f: &PrimeField, o: &Mat) -> Mat {
        assert_eq!(self.cols, o.rows);
        let mut out = Mat::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..o.cols {
                    let v = f.add(out.get(i, j), f.mul(a, o.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, f: &PrimeField, v: &[u32]) -> Vec<u32> {
        (0..self.rows)
            .map(|i| {
                let s: u64 = self.row(i).iter().zip(v).map(|(&a, &b)| a as u64 * b as u64 % f.p() as u64).sum();
                (s % f.p() as u64) as u32
            })
            .collect()
    }

    /// Reduced row echelon form in place; returns pivot columns.
    pub fn rref(&mut self, f: &PrimeField) -> Vec<usize> {
        let p = f.p() as u64;
        let cols = self.cols;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| self.get(i, c) != 0) else { continue };
            if pr != r {
                for j in 0..cols {
                    self.data.swap(pr * cols + j, r * cols + j);
                }
            }
            let inv = f.inv(self.get(r, c));
            for j in c..cols {
                let v = f.mul(self.get(r, j), inv);
                self.set(r, j, v);
            }
            let (before, rest) = self.data.split_at_mut(r * cols);
            let (prow, after) = rest.split_at_mut(cols);
            let reduce = |row: &mut [u32]| {
                let fac = row[c] as u64;
                if fac == 0 {
                    return;
                }
                let m = p - fac;
                for j in c..cols {
                    let x = prow[j];
                    if x != 0 {
                        row[j] = ((row[j] as u64 + m * x as u64) % p) as u32;
                    }
                }
            };
            before.chunks_mut(cols).for_each(reduce);
            after.chunks_mut(cols).for_each(reduce);
            pivots.push(c);
            r += 1;
        }
        pivots
    }
}

/// Reduced echelon basis of a growing subspace of F_p^dim.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub dim: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
    pivot_of: Vec<Option<usize>>,
}

impl Echelon {
    pub fn new(dim: usize) -> Self {
        Echelon { dim, rows: Vec::new(), pivots: Vec::new(), pivot_of: vec![None; dim] }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.pivot_of[col].is_some()
    }

    /// Non-pivot columns, i.e. labels of a complement basis.
    pub fn complement(&self) -> Vec<usize> {
        (0..self.dim).filter(|&c| self.pivot_of[c].is_none()).collect()
    }

    /// Subtracts the span; the result has zeros in every pivot column.
    pub fn reduce(&self, f: &PrimeField, v: &mut [u32]) {
        let p = f.p() as u64;
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            let fac = v[pc] as u64;
            if fac == 0 {
                continue;
            }
            let m = p - fac;
            for (x, &y) in v.iter_mut().zip(row) {
                if y != 0 {
                    *x = ((*x as u64 + m * y as u64) % p) as u32;
                }
            }
        }
    }

    /// Adds v to the span; returns false if it was already contained.
    pub fn insert(&mut self, f: &PrimeField, mut v: Vec<u32>) -> bool {
        self.reduce(f, &mut v);
        let Some(pc) = v.iter().position(|&x| x != 0) else { return false };
        let inv = f.inv(v[pc]);
        v.iter_mut().for_each(|x| *x = f.mul(*x, inv));
        let p = f.p() as u64;
        for row in &mut self.rows {
            let fac = row[pc] as u64;
            if fac == 0 {
                continue;
            }
            let m = p - fac;
            for (x, &y) in row.iter_mut().zip(&v) {
                if y != 0 {
                    *x = ((*x as u64 + m * y as u64) % p) as u32;
                }
            }
        }
        self.pivot_of[pc] = Some(self.rows.len());
        self.rows.push(v);
        self.pivots.push(pc);
        true
    }

    pub fn contains(&self, f: &PrimeField, v: &[u32]) -> bool {
        let mut w = v.to_vec();
        self.reduce(f, &mut w);
        w.iter().all(|&x| x == 0)
    }
}

/// Linear map between coordinate spaces of graded pieces.
#[derive(Clone, Debug)]
pub struct GradedPieceMap {
    pub src_deg: i64,
    pub tgt_deg: i64,
    pub mat: Mat,
}

impl GradedPieceMap {
    pub fn source_dim(&self) -> usize {
        self.mat.cols
    }

    pub fn target_dim(&self) -> usize {
        self.mat.rows
    }
}

pub fn rank(f: &PrimeField, m: &GradedPieceMap) -> usize {
    rank_mat(f, &m.mat)
}

pub fn rank_mat(f: &PrimeField, m: &Mat) -> usize {
    if m.rows == 0 || m.cols == 0 {
        return 0;
    }
    let mut w = m.clone();
    w.rref(f).len()
}

pub fn kernel_basis(f: &PrimeField, m: &GradedPieceMap) -> Vec<Vec<u32>> {
    kernel_mat(f, &m.mat)
}

/// Basis of {x : m·x = 0}, one vector per free column.
pub fn kernel_mat(f: &PrimeField, m: &Mat) -> Vec<Vec<u32>> {
    let mut w = m.clone();
    let pivots = w.rref(f);
    let mut is_pivot = vec![false; m.cols];
    pivots.iter().for_each(|&c| is_pivot[c] = true);
    let mut out = Vec::new();
    for free in (0..m.cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![0u32; m.cols];
        v[free] = 1;
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = f.neg(w.get(r, free));
        }
        out.push(v);
    }
    out
}

pub fn solve(f: &PrimeField, m: &GradedPieceMap, target: &[u32]) -> Option<Vec<u32>> {
    let (rows, cols) = (m.mat.rows, m.mat.cols);
    assert_eq!(target.len(), rows);
    let mut aug = Mat::zeros(rows, cols + 1);
    for (i, &x) in target.iter().enumerate() {
        for j in 0..cols {
            aug.set(i, j, m.mat.get(i, j));
        }
        aug.set(i, cols, x);
    }
    let pivots = aug.rref(f);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![0u32; cols];
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = aug.get(r, cols);
    }
    Some(x)
}

/// Column labels outside the pivot set of the row space, i.e. coset representatives.
pub fn row_space_complement(f: &PrimeField, m: &GradedPieceMap) -> Vec<usize> {
    let mut e = Echelon::new(m.mat.cols);
    for i in 0..m.mat.rows {
        e.insert(f, m.mat.row(i).to_vec());
    }
    e.complement()
}

/// Matrix of multiplication by a homogeneous f from R_d to R_{d+e}.
pub fn mul_map(fld: &PrimeField, f: &MultiPoly, n: usize, d: i64) -> Result<GradedPieceMap> {
    if !f.is_homogeneous() {
        return Err(pre("mul_map needs a homogeneous polynomial"));
    }
    let e = f.degree().unwrap_or(0);
    let src = monomials(n, d);
    let tgt = monomials(n, d + e);
    let index: HashMap<Mono, usize> = tgt.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let mut mat = Mat::zeros(tgt.len(), src.len());
    for (j, &m) in src.iter().enumerate() {
        for &(fm, c) in &f.terms {
            let i = index[&mono_mul(fm, m)];
            mat.set(i, j, fld.add(mat.get(i, j), c));
        }
    }
    Ok(GradedPieceMap { src_deg: d, tgt_deg: d + e, mat })
}

/// Multidegree key: total degree followed by fine weight coordinates.
pub type Key = Vec<i32>;

pub fn key_add(a: &[i32], b: &[i32]) -> Key {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn key_sub(a: &[i32], b: &[i32]) -> Key {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Monomials of one key with a lookup index.
#[derive(Debug)]
pub struct KeyBasis {
    pub key: Key,
    pub monos: Vec<Mono>,
    pub index: HashMap<Mono, usize>,
}

impl KeyBasis {
    pub fn len(&self) -> usize {
        self.monos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monos.is_empty()
    }

    pub fn pos(&self, m: Mono) -> usize {
        self.index[&m]
    }
}

#[derive(Debug, Default)]
pub struct DegreeBuckets {
    pub keys: Vec<Key>,
    pub by_key: HashMap<Key, Arc<KeyBasis>>,
}

/// Polynomial ring k[x_0..x_n] with a multigrading refining the total degree.
/// Each variable carries a weight vector; the key of a monomial is its total
/// degree followed by the weighted sum of exponents.
#[derive(Debug)]
pub struct GradedRing {
    pub n: usize,
    pub field: PrimeField,
    weights: Vec<Vec<i32>>,
    width: usize,
    buckets: Mutex<HashMap<i64, Arc<DegreeBuckets>>>,
}

impl GradedRing {
    /// Standard grading by total degree only.
    pub fn standard(n: usize, field: PrimeField) -> Self {
        GradedRing::with_weights(n, field, vec![Vec::new(); n + 1])
    }

    pub fn with_weights(n: usize, field: PrimeField, weights: Vec<Vec<i32>>) -> Self {
        assert!(n < MAX_VARS, "at most {MAX_VARS} variables");
        assert_eq!(weights.len(), n + 1);
        let width = weights.iter().map(Vec::len).max().unwrap_or(0);
        let weights = weights
            .into_iter()
            .map(|mut w| {
                w.resize(width, 0);
                w
            })
            .collect();
        GradedRing { n, field, weights, width, buckets: Mutex::new(HashMap::new()) }
    }

    pub fn nvars(&self) -> usize {
        self.n + 1
    }

    pub fn is_fine(&self) -> bool {
        self.width > 0
    }

    pub fn key_len(&self) -> usize {
        self.width + 1
    }

    pub fn mono_key(&self, m: Mono) -> Key {
        let mut k = vec![0i32; self.width + 1];
        for v in 0..=self.n {
            let e = mono_exp(m, v) as i32;
            if e == 0 {
                continue;
            }
            k[0] += e;
            for (x, &w) in k[1..].iter_mut().zip(&self.weights[v]) {
                *x += e * w;
            }
        }
        k
    }

    /// Key of a homogeneous polynomial, or None if it is zero or not homogeneous.
    pub fn poly_key(&self, p: &MultiPoly) -> Option<Key> {
        let mut it = p.terms.iter().map(|&(m, _)| self.mono_key(m));
        let k = it.next()?;
        it.all(|x| x == k).then_some(k)
    }

    /// Key of pure degree d with zero fine part.
    pub fn degree_key(&self, d: i64) -> Key {
        let mut k = vec![0; self.width + 1];
        k[0] = d as i32;
        k
    }

    pub fn buckets(&self, d: i64) -> Arc<DegreeBuckets> {
        if let Some(b) = self.buckets.lock().unwrap().get(&d) {
            return b.clone();
        }
        let mut groups: HashMap<Key, Vec<Mono>> = HashMap::new();
        let mut order: Vec<Key> = Vec::new();
        for m in monomials(self.n, d) {
            let k = self.mono_key(m);
            groups
                .entry(k)
                .or_insert_with_key(|k| {
                    order.push(k.clone());
                    Vec::new()
                })
                .push(m);
        }
        order.sort();
        let by_key = groups
            .into_iter()
            .map(|(k, monos)| {
                let index = monos.iter().enumerate().map(|(i, &m)| (m, i)).collect();
                (k.clone(), Arc::new(KeyBasis { key: k, monos, index }))
            })
            .collect();
        let b = Arc::new(DegreeBuckets { keys: order, by_key });
        self.buckets.lock().unwrap().entry(d).or_insert(b).clone()
    }

    /// Monomial basis of the key, or None when no monomial has it.
    pub fn basis(&self, key: &[i32]) -> Option<Arc<KeyBasis>> {
        let d = key[0] as i64;
        if d < 0 {
            return None;
        }
        self.buckets(d).by_key.get(key).cloned()
    }

    /// Coordinates of p (assumed of key `basis.key`) in the basis.
    pub fn coords(&self, p: &MultiPoly, basis: &KeyBasis) -> Vec<u32> {
        let mut v = vec![0u32; basis.len()];
        for &(m, c) in &p.terms {
            v[basis.pos(m)] = c;
        }
        v
    }

    /// Coordinates of m·p, accumulated into v.
    pub fn add_product_coords(&self, v: &mut [u32], m: Mono, c: u32, p: &MultiPoly, basis: &KeyBasis) {
        let f = &self.field;
        for &(pm, pc) in &p.terms {
            let i = basis.pos(mono_mul(m, pm));
            v[i] = f.add(v[i], f.mul(c, pc));
        }
    }
}
