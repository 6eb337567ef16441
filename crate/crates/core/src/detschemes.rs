//! Homogeneous matrices, their ideals of minors and column-deletion flags.

use crate::error::{pre, Error, Result};
use crate::gfpoly::{MAX_DEGREE, key_add, key_sub, mono_from_exps, random_homogeneous_with, GradedRing, Key, MultiPoly, PrimeField};
use crate::gradedhom::{hf_ideal_quotient, hf_quotient, Ideal, SyzygyBlock};
use crate::invariants::{mdg, mdr, DegreeData};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

/// How the entries of a matrix are produced.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MatrixSpec {
    Generic,
    Random { seed: u64 },
    Power,
    /// Row-major entry strings; `rand` draws a random form of the entry degree.
    Explicit { entries: Vec<Vec<String>>, seed: u64 },
}

/// Matrix of φ*: entry (i,j) is homogeneous of degree a_j − b_i.
/// Row i carries the key of the basis element f_i of F*, column j that of e_j.
#[derive(Clone, Debug)]
pub struct HomMatrix {
    pub data: DegreeData,
    pub ring: Arc<GradedRing>,
    pub entries: Vec<Vec<MultiPoly>>,
    pub row_keys: Vec<Key>,
    pub col_keys: Vec<Key>,
}

impl HomMatrix {
    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.entries.first().map_or(0, Vec::len)
    }

    pub fn field(&self) -> &PrimeField {
        &self.ring.field
    }

    /// First `k` columns.
    pub fn truncated(&self, k: usize) -> HomMatrix {
        HomMatrix {
            data: self.data.truncated(k as i64),
            ring: self.ring.clone(),
            entries: self.entries.iter().map(|row| row[..k].to_vec()).collect(),
            row_keys: self.row_keys.clone(),
            col_keys: self.col_keys[..k].to_vec(),
        }
    }

    pub fn has_unit_in_column(&self, j: usize) -> bool {
        self.entries.iter().any(|row| row[j].degree() == Some(0))
    }
}

fn check_shape(d: &DegreeData) -> Result<(usize, usize)> {
    let t = d.t as usize;
    let cols = d.cols() as usize;
    if d.a.len() != cols || d.b.len() != t {
        return Err(Error::Matrix(format!("degree data lengths do not match a {t}×{cols} matrix")));
    }
    Ok((t, cols))
}

fn coarse_keys(d: &DegreeData) -> (Vec<Key>, Vec<Key>) {
    (d.b.iter().map(|&b| vec![b as i32]).collect(), d.a.iter().map(|&a| vec![a as i32]).collect())
}

/// Builds a matrix whose entry (i,j) is x_{v(i,j)}^{e(i,j)} with distinct
/// variables, using the row/column multigrading that makes every minor homogeneous.
fn grid_matrix(d: &DegreeData, field: PrimeField, var: impl Fn(usize, usize) -> usize) -> Result<HomMatrix> {
    let (t, cols) = check_shape(d)?;
    let n = d.n as usize;
    let exps: Vec<Vec<i64>> = (0..t).map(|i| (0..cols).map(|j| d.a[j] - d.b[i]).collect()).collect();
    if exps.iter().flatten().any(|&e| e == 0) {
        return Err(Error::Matrix("entry of degree 0 would be a unit".into()));
    }
    if exps.iter().flatten().any(|&e| e > 15) {
        return Err(Error::Matrix("entry degree exceeds monomial packing limit".into()));
    }
    let l = exps.iter().flatten().filter(|&&e| e > 0).fold(1i64, |l, &e| num_lcm(l, e)) as i32;
    let width = t + cols;
    let mut weights: Vec<Vec<i32>> = vec![Vec::new(); n + 1];
    let mut used = vec![false; n + 1];
    let mut entries = vec![vec![MultiPoly::zero(n + 1); cols]; t];
    for i in 0..t {
        for j in 0..cols {
            let e = exps[i][j];
            if e < 0 {
                continue;
            }
            let v = var(i, j);
            if v > n || used[v] {
                return Err(Error::Matrix(format!("needs at least {} variables, have {}", t * cols, n + 1)));
            }
            used[v] = true;
            let mut w = vec![0i32; width];
            w[i] = l / e as i32;
            w[t + j] = l / e as i32;
            weights[v] = w;
            let mut ex = vec![0u32; n + 1];
            ex[v] = e as u32;
            entries[i][j] = MultiPoly::monomial(n + 1, mono_from_exps(&ex), 1);
        }
    }
    let extra: Vec<usize> = (0..=n).filter(|&v| !used[v]).collect();
    for (k, &v) in extra.iter().enumerate() {
        let mut w = vec![0i32; width + extra.len()];
        w[width + k] = 1;
        weights[v] = w;
    }
    let ring = Arc::new(GradedRing::with_weights(n, field, weights));
    let key_len = ring.key_len();
    let row_keys = (0..t)
        .map(|i| {
            let mut k = vec![0i32; key_len];
            k[0] = d.b[i] as i32;
            k[1 + i] = -l;
            k
        })
        .collect();
    let col_keys = (0..cols)
        .map(|j| {
            let mut k = vec![0i32; key_len];
            k[0] = d.a[j] as i32;
            k[1 + t + j] = l;
            k
        })
        .collect();
    Ok(HomMatrix { data: d.clone(), ring, entries, row_keys, col_keys })
}

fn num_lcm(a: i64, b: i64) -> i64 {
    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 { a } else { gcd(b, a % b) }
    }
    a / gcd(a, b) * b
}

/// Matrix of indeterminates x_{i·cols+j}; all entry degrees must be 1.
pub fn generic_matrix(d: &DegreeData, field: PrimeField) -> Result<HomMatrix> {
    let (t, cols) = check_shape(d)?;
    if (0..t).any(|i| (0..cols).any(|j| d.a[j] - d.b[i] != 1)) {
        return Err(Error::Matrix("generic matrix needs every entry degree equal to 1".into()));
    }
    if (d.n as usize + 1) < t * cols {
        return Err(Error::Matrix(format!("needs at least {} variables, have {}", t * cols, d.n + 1)));
    }
    grid_matrix(d, field, |i, j| i * cols + j)
}

/// Entry (i,j) = x_{i·cols+j}^{a_j−b_i}; negative degrees give zero entries.
pub fn power_matrix(d: &DegreeData, field: PrimeField) -> Result<HomMatrix> {
    let (_, cols) = check_shape(d)?;
    grid_matrix(d, field, |i, j| i * cols + j)
}

/// Entries are dense random forms of degree a_j − b_i drawn in row-major order.
pub fn random_matrix(d: &DegreeData, field: PrimeField, seed: u64) -> Result<HomMatrix> {
    let (t, cols) = check_shape(d)?;
    let n = d.n as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = vec![vec![MultiPoly::zero(n + 1); cols]; t];
    for (row, bi) in entries.iter_mut().zip(&d.b) {
        for (entry, aj) in row.iter_mut().zip(&d.a) {
            let e = aj - bi;
            if e >= 0 {
                *entry = random_homogeneous_with(&field, e, n, &mut rng);
            }
        }
    }
    let ring = Arc::new(GradedRing::standard(n, field));
    let (row_keys, col_keys) = coarse_keys(d);
    Ok(HomMatrix { data: d.clone(), ring, entries, row_keys, col_keys })
}

/// Matrix from given entries over the standard grading, checking degrees.
pub fn matrix_from_entries(d: &DegreeData, field: PrimeField, entries: Vec<Vec<MultiPoly>>) -> Result<HomMatrix> {
    let (t, cols) = check_shape(d)?;
    if entries.len() != t || entries.iter().any(|r| r.len() != cols) {
        return Err(Error::Matrix(format!("expected a {t}×{cols} entry array")));
    }
    for (i, row) in entries.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            if e.is_zero() {
                continue;
            }
            let want = d.a[j] - d.b[i];
            if !e.is_homogeneous() || e.degree() != Some(want) {
                return Err(Error::Matrix(format!("entry ({},{}) = {e} is not homogeneous of degree {want}", i + 1, j + 1)));
            }
            if e.nvars != d.n as usize + 1 {
                return Err(Error::Matrix(format!("entry ({},{}) uses the wrong ring", i + 1, j + 1)));
            }
        }
    }
    let ring = Arc::new(GradedRing::standard(d.n as usize, field));
    let (row_keys, col_keys) = coarse_keys(d);
    Ok(HomMatrix { data: d.clone(), ring, entries, row_keys, col_keys })
}

/// Parses `c*x0^2*x3 - x1 + ...`; `rand` stands for a random form of degree `deg`.
pub fn parse_poly(s: &str, field: &PrimeField, n: usize, deg: i64, rng: &mut ChaCha8Rng) -> Result<MultiPoly> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s == "rand" {
        return Ok(random_homogeneous_with(field, deg, n, rng));
    }
    let bad = |msg: &str| Error::Parse(format!("polynomial `{s}`: {msg}"));
    let mut terms = Vec::new();
    let mut rest = s.as_str();
    if rest.is_empty() {
        return Err(bad("empty"));
    }
    while !rest.is_empty() {
        let (sign, body) = match rest.as_bytes()[0] {
            b'-' => (-1i64, &rest[1..]),
            b'+' => (1, &rest[1..]),
            _ => (1, rest),
        };
        let end = body.find(['+', '-']).unwrap_or(body.len());
        let term = &body[..end];
        rest = &body[end..];
        if term.is_empty() {
            return Err(bad("empty term"));
        }
        let mut coef = sign;
        let mut exps = vec![0u32; n + 1];
        for factor in term.split('*') {
            if let Some(v) = factor.strip_prefix('x') {
                let (idx, e) = match v.split_once('^') {
                    Some((i, e)) => (i, e.parse::<u32>().map_err(|_| bad("bad exponent"))?),
                    None => (v, 1),
                };
                let idx: usize = idx.parse().map_err(|_| bad("bad variable index"))?;
                if idx > n {
                    return Err(bad(&format!("variable x{idx} outside x0..x{n}")));
                }
                exps[idx] += e;
            } else {
                coef *= factor.parse::<i64>().map_err(|_| bad(&format!("bad factor `{factor}`")))?;
            }
        }
        if exps.iter().sum::<u32>() > 15 || exps.iter().any(|&e| e > 15) {
            return Err(bad("degree exceeds monomial packing limit"));
        }
        terms.push((mono_from_exps(&exps), field.from_i64(coef)));
    }
    Ok(MultiPoly::from_terms(field, n + 1, terms))
}

/// Builds a matrix from a spec. Explicit matrices whose entries are powers of
/// distinct variables get the fine grading, like power matrices.
pub fn build_matrix(d: &DegreeData, spec: &MatrixSpec, field: PrimeField) -> Result<HomMatrix> {
    match spec {
        MatrixSpec::Generic => generic_matrix(d, field),
        MatrixSpec::Power => power_matrix(d, field),
        MatrixSpec::Random { seed } => random_matrix(d, field, *seed),
        MatrixSpec::Explicit { entries, seed } => {
            let (t, cols) = check_shape(d)?;
            if entries.len() != t || entries.iter().any(|r| r.len() != cols) {
                return Err(Error::Matrix(format!("expected a {t}×{cols} entry array")));
            }
            let n = d.n as usize;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut polys = Vec::with_capacity(t);
            for (i, row) in entries.iter().enumerate() {
                let mut prow = Vec::with_capacity(cols);
                for (j, s) in row.iter().enumerate() {
                    prow.push(parse_poly(s, &field, n, d.a[j] - d.b[i], &mut rng)?);
                }
                polys.push(prow);
            }
            if let Some(vars) = distinct_powers(&polys, d) {
                return grid_matrix(d, field, |i, j| vars[&(i, j)]);
            }
            matrix_from_entries(d, field, polys)
        }
    }
}

/// Variable of each entry when every nonzero entry is x_v^{a_j−b_i} with distinct v
/// and entries are zero exactly when a_j < b_i.
fn distinct_powers(polys: &[Vec<MultiPoly>], d: &DegreeData) -> Option<HashMap<(usize, usize), usize>> {
    let mut vars = HashMap::new();
    let mut seen = std::collections::HashSet::new();
    for (i, row) in polys.iter().enumerate() {
        for (j, p) in row.iter().enumerate() {
            let e = d.a[j] - d.b[i];
            if e < 0 {
                if !p.is_zero() {
                    return None;
                }
                continue;
            }
            let [(m, 1)] = p.terms[..] else { return None };
            let ex = crate::gfpoly::mono_exps(m, p.nvars);
            let nz: Vec<usize> = (0..ex.len()).filter(|&v| ex[v] != 0).collect();
            if nz.len() != 1 || ex[nz[0]] as i64 != e || !seen.insert(nz[0]) {
                return None;
            }
            vars.insert((i, j), nz[0]);
        }
    }
    Some(vars)
}

/// Drops the last column.
pub fn delete_last_column(m: &HomMatrix) -> HomMatrix {
    m.truncated(m.cols() - 1)
}

/// Ideal generated by the s×s minors of a matrix.
#[derive(Clone, Debug)]
pub struct MinorsIdeal {
    pub data: DegreeData,
    pub ring: Arc<GradedRing>,
    pub s: usize,
    pub gens: Vec<MultiPoly>,
    pub keys: Vec<Key>,
    /// Row and column selections of each kept generator.
    pub labels: Vec<(Vec<usize>, Vec<usize>)>,
    pub total_minors: usize,
    pub zero_minors: usize,
    pub(crate) ideal_cache: OnceLock<Arc<Ideal>>,
    pub(crate) syz_cache: OnceLock<Arc<SyzygyBlock>>,
}

impl MinorsIdeal {
    pub fn expected_codim(&self) -> i64 {
        self.data.codim()
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.keys.iter().map(|k| k[0] as i64).collect()
    }

    /// Closed-form syzygy degree bound, or the top generator degree for a principal ideal.
    pub fn syzygy_bound(&self) -> i64 {
        mdr(&self.data).unwrap_or_else(|| mdg(&self.data))
    }

    /// Ideal with cached graded pieces, shared by all clones made after first use.
    pub fn ideal(&self) -> Arc<Ideal> {
        self.ideal_cache.get_or_init(|| Arc::new(Ideal::new(self.ring.clone(), self.gens.clone(), self.keys.clone()))).clone()
    }

    /// Minimal generators and first syzygies up to the closed-form bound.
    pub fn syzygies(&self) -> Arc<SyzygyBlock> {
        self.syz_cache
            .get_or_init(|| {
                let mut block = crate::gradedhom::syzygy_generators(&self.ideal(), self.syzygy_bound()).expect("bound covers generator degrees");
                block.complete = true;
                Arc::new(block)
            })
            .clone()
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    use itertools::Itertools;
    (0..n).combinations(k).collect()
}

/// All s×s minors by Laplace expansion along the first selected row.
pub fn minors(m: &HomMatrix, s: usize) -> Result<MinorsIdeal> {
    let (t, cols) = (m.rows(), m.cols());
    if s == 0 || s > t.min(cols) {
        return Err(pre(format!("minor size {s} outside 1..={}", t.min(cols))));
    }
    let f = m.field().clone();
    let mut memo: HashMap<(u64, u64), MultiPoly> = HashMap::new();
    fn det(m: &HomMatrix, f: &PrimeField, rows: &[usize], cols: &[usize], memo: &mut HashMap<(u64, u64), MultiPoly>) -> MultiPoly {
        if rows.len() == 1 {
            return m.entries[rows[0]][cols[0]].clone();
        }
        let key = (rows.iter().fold(0u64, |a, &r| a | 1 << r), cols.iter().fold(0u64, |a, &c| a | 1 << c));
        if let Some(p) = memo.get(&key) {
            return p.clone();
        }
        let mut acc = MultiPoly::zero(m.ring.nvars());
        for (k, &c) in cols.iter().enumerate() {
            let e = &m.entries[rows[0]][c];
            if e.is_zero() {
                continue;
            }
            let sub_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let sub = det(m, f, &rows[1..], &sub_cols, memo);
            if sub.is_zero() {
                continue;
            }
            let term = e.mul(f, &sub);
            acc = if k % 2 == 0 { acc.add(f, &term) } else { acc.sub(f, &term) };
        }
        memo.insert(key, acc.clone());
        acc
    }
    let mut gens = Vec::new();
    let mut keys = Vec::new();
    let mut labels = Vec::new();
    let mut total = 0;
    for rs in combinations(t, s) {
        for cs in combinations(cols, s) {
            total += 1;
            let p = det(m, &f, &rs, &cs, &mut memo);
            if p.is_zero() {
                continue;
            }
            let mut key = m.col_keys[cs[0]].clone();
            for &c in &cs[1..] {
                key = key_add(&key, &m.col_keys[c]);
            }
            for &r in &rs {
                key = key_sub(&key, &m.row_keys[r]);
            }
            debug_assert_eq!(m.ring.poly_key(&p).as_ref(), Some(&key));
            gens.push(p);
            keys.push(key);
            labels.push((rs.clone(), cs));
        }
    }
    let zero = total - gens.len();
    let r = (t + 1 - s) as i64;
    let mut data = m.data.clone();
    data.r = r;
    Ok(MinorsIdeal {
        data,
        ring: m.ring.clone(),
        s,
        gens,
        keys,
        labels,
        total_minors: total,
        zero_minors: zero,
        ideal_cache: OnceLock::new(),
        syz_cache: OnceLock::new(),
    })
}

/// Chain of quotients A_{2−r} ↠ … ↠ A_c from deleting columns on the right.
#[derive(Clone, Debug)]
pub struct Flag {
    pub r: i64,
    pub first: i64,
    pub stages: Vec<HomMatrix>,
    pub ideals: Vec<MinorsIdeal>,
}

impl Flag {
    /// Stage A_j for 2−r ≤ j ≤ c.
    pub fn stage(&self, j: i64) -> &MinorsIdeal {
        &self.ideals[(j - self.first) as usize]
    }

    pub fn matrix(&self, j: i64) -> &HomMatrix {
        &self.stages[(j - self.first) as usize]
    }

    pub fn top(&self) -> i64 {
        self.first + self.ideals.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.ideals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ideals.is_empty()
    }
}

pub fn build_flag(m: &HomMatrix, r: i64) -> Result<Flag> {
    let t = m.rows() as i64;
    let c = m.cols() as i64 - t + 1;
    if r < 1 || r >= t || r < 2 - c {
        return Err(pre(format!("r = {r} invalid for a {t}×{} matrix", m.cols())));
    }
    let first = 2 - r;
    let s = (t + 1 - r) as usize;
    for j in (t + first) as usize..m.cols() {
        if m.has_unit_in_column(j) {
            return Err(Error::Matrix(format!("deleted column {} contains a unit", j + 1)));
        }
    }
    let mut stages = Vec::new();
    let mut ideals = Vec::new();
    for j in first..=c {
        let mj = m.truncated((t + j - 1) as usize);
        let mut ideal = minors(&mj, s)?;
        ideal.data.r = r;
        ideals.push(ideal);
        stages.push(mj);
    }
    Ok(Flag { r, first, stages, ideals })
}

/// Krull dimension estimate of R/I from the degree of the polynomial
/// interpolating the Hilbert function on the window. Heuristic.
pub fn dimension_estimate(i: &MinorsIdeal, window: (i64, i64)) -> Result<i64> {
    let (d0, d1) = window;
    if d1 < d0 + 2 || d0 < 0 {
        return Err(pre(format!("window {d0}..{d1} too small to fit")));
    }
    let vals: Vec<i64> = (d0..=d1).map(|d| hf_quotient(i, d)).collect();
    if vals.iter().all(|&v| v == 0) {
        return Ok(0);
    }
    let mut diff = vals;
    for k in 0..diff.len() {
        if diff.len() >= 2 && diff.iter().all(|&v| v == diff[0]) && diff[0] != 0 {
            return Ok(k as i64 + 1);
        }
        if diff.len() < 2 {
            break;
        }
        diff = diff.windows(2).map(|w| w[1] - w[0]).collect();
    }
    Err(pre(format!("window {d0}..{d1} too small to fit")))
}

/// Default window: a few degrees past the syzygy bound, long enough for the expected dimension.
pub fn default_window(i: &MinorsIdeal) -> (i64, i64) {
    let d0 = (i.syzygy_bound() - 1).max(0);
    let guess = (i.data.n + 1 - i.data.codim()).max(0);
    (d0, d0 + guess + 2)
}

/// Codimension test: restricts the ideal to a random linear subspace with
/// `codim` coordinates and checks that the restriction is Artinian, i.e. that
/// some graded piece of the quotient vanishes. Degrees are scanned up to
/// k(s−1)+1, capped by the monomial packing limit. A non-generic restriction
/// can only reject, never accept, a wrong codimension.
pub fn has_expected_codim(i: &MinorsIdeal, seed: u64) -> Result<bool> {
    let k = i.data.codim();
    let nv = i.ring.nvars() as i64;
    if k > nv {
        return Ok(false);
    }
    let field = i.ring.field.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let forms: Vec<MultiPoly> = (0..nv).map(|_| random_homogeneous_with(&field, 1, (k - 1) as usize, &mut rng)).collect();
    let ring = Arc::new(GradedRing::standard((k - 1) as usize, field.clone()));
    let gens: Vec<MultiPoly> = i.gens.iter().map(|g| g.substitute(&field, &forms)).collect();
    let top = i.degrees().into_iter().max().unwrap_or(0);
    let cut = Ideal::from_gens(ring, gens)?;
    let last = (k * (top - 1).max(0) + 1).min(MAX_DEGREE);
    Ok((top..=last).any(|d| hf_ideal_quotient(&cut, d) == 0))
}

/// Random matrix whose top ideal has the expected codimension, retrying with
/// seed+1 up to five times. Returns the matrix and the seed used.
pub fn random_matrix_checked(d: &DegreeData, field: PrimeField, seed: u64) -> Result<(HomMatrix, u64)> {
    let s = d.minor_size() as usize;
    for k in 0..5 {
        let m = random_matrix(d, field.clone(), seed + k)?;
        let ideal = minors(&m, s)?;
        if has_expected_codim(&ideal, seed + k)? {
            return Ok((m, seed + k));
        }
    }
    Err(Error::Matrix(format!("no draw of expected codimension {} in 5 seeds from {seed}", d.codim())))
}
