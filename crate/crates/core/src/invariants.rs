//! Exact integer combinatorics of determinantal loci: the invariants λ, K, K',
//! s_r, mdg/mdr, the κ corrections, Betti tables of the standard resolutions,
//! hypothesis predicates and the dimension prediction ladder.

use crate::error::{invalid, pre, Result};
use itertools::Itertools;
use serde::{Deserialize, Serialize};

/// Binomial coefficient with the convention C(m, k) = 0 for m < k.
pub fn binom_trunc(m: i64, k: i64) -> i64 {
    assert!(k >= 0, "binom_trunc: k must be nonnegative");
    if m < k {
        return 0;
    }
    let k = k.min(m - k) as u128;
    let m = m as u128;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (m - i) / (i + 1);
    }
    i64::try_from(acc).expect("binomial overflows i64")
}

/// Degree data of a homogeneous t × (t+c−1) matrix with entry degrees a_j − b_i,
/// together with the minor size index r (minors of size t+1−r) and ambient P^n.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeData {
    pub t: i64,
    pub c: i64,
    pub r: i64,
    pub n: i64,
    pub a: Vec<i64>,
    pub b: Vec<i64>,
}

impl DegreeData {
    pub fn new(t: i64, c: i64, r: i64, n: i64, a: Vec<i64>, b: Vec<i64>) -> Result<Self> {
        let d = Self::raw(t, c, r, n, a, b);
        d.validate()?;
        Ok(d)
    }

    /// Builds without validation; used for transposes and intermediate stages.
    pub fn raw(t: i64, c: i64, r: i64, n: i64, a: Vec<i64>, b: Vec<i64>) -> Self {
        DegreeData { t, c, r, n, a, b }
    }

    pub fn validate(&self) -> Result<()> {
        let (t, c, r) = (self.t, self.c, self.r);
        if t < 2 {
            return Err(invalid("t", format!("t = {t} must be at least 2")));
        }
        if t + c - 1 < 1 {
            return Err(invalid("c", format!("t+c-1 = {} columns is not positive", t + c - 1)));
        }
        if self.a.len() as i64 != t + c - 1 {
            return Err(invalid("a", format!("expected {} entries, got {}", t + c - 1, self.a.len())));
        }
        if self.b.len() as i64 != t {
            return Err(invalid("b", format!("expected {t} entries, got {}", self.b.len())));
        }
        if self.a.windows(2).any(|w| w[0] > w[1]) {
            return Err(invalid("a", "must be nondecreasing"));
        }
        if self.b.windows(2).any(|w| w[0] > w[1]) {
            return Err(invalid("b", "must be nondecreasing"));
        }
        let m = self.a.len().min(self.b.len());
        if (0..m).any(|i| self.b[i] > self.a[i]) {
            return Err(invalid("b", "b_i <= a_i must hold for every i"));
        }
        if !(0..m).any(|i| self.b[i] < self.a[i]) {
            return Err(invalid("a", "b_i < a_i must hold for some i"));
        }
        if r < 1.max(2 - c) || r >= t {
            return Err(invalid("r", format!("need max(1, 2-c) <= r < t, got r = {r}")));
        }
        if self.codim() <= 0 {
            return Err(invalid("r", "expected codimension r(c+r-1) must be positive"));
        }
        if self.n < 1 {
            return Err(invalid("n", "ambient dimension must be positive"));
        }
        Ok(())
    }

    /// a_j, 1-based.
    #[inline]
    pub fn a(&self, j: i64) -> i64 {
        self.a[(j - 1) as usize]
    }

    /// b_i, 1-based.
    #[inline]
    pub fn b(&self, i: i64) -> i64 {
        self.b[(i - 1) as usize]
    }

    pub fn cols(&self) -> i64 {
        self.t + self.c - 1
    }

    /// Expected codimension r(c+r−1) of the locus of (t+1−r)-minors.
    pub fn codim(&self) -> i64 {
        self.r * (self.c + self.r - 1)
    }

    /// Krull dimension n+1−r(c+r−1) of the determinantal quotient.
    pub fn dim_a(&self) -> i64 {
        self.n + 1 - self.codim()
    }

    pub fn minor_size(&self) -> i64 {
        self.t + 1 - self.r
    }

    pub fn codim_fits(&self) -> bool {
        self.codim() <= self.n
    }

    /// Data of the first `cols` columns, keeping t, r and n.
    pub fn truncated(&self, cols: i64) -> DegreeData {
        DegreeData::raw(self.t, cols - self.t + 1, self.r, self.n, self.a[..cols as usize].to_vec(), self.b.clone())
    }

    /// Data with the last column deleted.
    pub fn deleted(&self) -> DegreeData {
        self.truncated(self.cols() - 1)
    }

    fn sum_a(&self, lo: i64, hi: i64) -> i64 {
        (lo..=hi).map(|j| self.a(j)).sum()
    }

    fn sum_b(&self, lo: i64, hi: i64) -> i64 {
        (lo..=hi).map(|i| self.b(i)).sum()
    }
}

pub fn lambda_c(d: &DegreeData) -> i64 {
    let n = d.n;
    let mut s = 1;
    for &ai in &d.a {
        for &bj in &d.b {
            s += binom_trunc(ai - bj + n, n) + binom_trunc(bj - ai + n, n);
        }
    }
    for &ai in &d.a {
        for &aj in &d.a {
            s -= binom_trunc(ai - aj + n, n);
        }
    }
    for &bi in &d.b {
        for &bj in &d.b {
            s -= binom_trunc(bi - bj + n, n);
        }
    }
    s
}

/// ℓ_i = Σ_{j ≤ t+i−1} a_j − Σ b_k, for 1 ≤ i ≤ c.
pub fn ell(d: &DegreeData, i: i64) -> i64 {
    d.sum_a(1, d.t + i - 1) - d.sum_b(1, d.t)
}

/// h_{i−3} = 2a_{t+i−1} − ℓ_i + n.
pub fn h(d: &DegreeData, i: i64) -> i64 {
    2 * d.a(d.t + i - 1) - ell(d, i) + d.n
}

/// K_i for 3 ≤ i ≤ c, as the signed sum over p + q = i − 3.
pub fn k_term(d: &DegreeData, i: i64) -> i64 {
    assert!(i >= 3 && i <= d.c, "K_i needs 3 <= i <= c");
    let base = h(d, i);
    let mut total = 0;
    for p in 0..=(i - 3) {
        let q = i - 3 - p;
        let sign = if (i - 1 - p) % 2 == 0 { 1 } else { -1 };
        for ai in (1..=d.t + i - 2).combinations(p as usize) {
            let sa: i64 = ai.iter().map(|&j| d.a(j)).sum();
            for bj in (1..=d.t).combinations_with_replacement(q as usize) {
                let sb: i64 = bj.iter().map(|&j| d.b(j)).sum();
                total += sign * binom_trunc(base + sa + sb, d.n);
            }
        }
    }
    total
}

/// Σ_{i=3}^{c} K_i (zero when c ≤ 2).
pub fn k_total(d: &DegreeData) -> i64 {
    (3..=d.c).map(|i| k_term(d, i)).sum()
}

/// ℓ'_i = Σ_{j ≤ t−r+1} a_j − Σ_{k=r−i+1}^{t} b_k.
pub fn ell_prime(d: &DegreeData, i: i64) -> i64 {
    d.sum_a(1, d.t - d.r + 1) - d.sum_b(d.r - i + 1, d.t)
}

/// h'_{i−3} = −2b_{r−i+1} − ℓ'_i + n.
pub fn h_prime(d: &DegreeData, i: i64) -> i64 {
    -2 * d.b(d.r - i + 1) - ell_prime(d, i) + d.n
}

/// K'_i for 3 ≤ i ≤ r, the transposed analogue of K_i.
pub fn k_prime(d: &DegreeData, i: i64) -> i64 {
    assert!(i >= 3 && i <= d.r, "K'_i needs 3 <= i <= r");
    let base = h_prime(d, i);
    let mut total = 0;
    for x in 0..=(i - 3) {
        let y = i - 3 - x;
        let sign = if (i - 1 - x) % 2 == 0 { 1 } else { -1 };
        for bi in (d.r - i + 2..=d.t).combinations(x as usize) {
            let sb: i64 = bi.iter().map(|&k| d.b(k)).sum();
            for aj in (1..=d.t - d.r + 1).combinations_with_replacement(y as usize) {
                let sa: i64 = aj.iter().map(|&k| d.a(k)).sum();
                total += sign * binom_trunc(base - sb - sa, d.n);
            }
        }
    }
    total
}

/// Σ_{i=3}^{r} K'_i.
pub fn k_prime_total(d: &DegreeData) -> i64 {
    (3..=d.r).map(|i| k_prime(d, i)).sum()
}

/// Σ_{i=3}^{2−c} K_i of the transposed data; the K' sum bounding every c < 1.
pub fn k_prime_total_transposed(d: &DegreeData) -> i64 {
    k_total(&transpose_data(d))
}

/// s_ρ = Σ_{i ≤ t−ρ+1} a_i − Σ_{i ≤ t−ρ} b_{ρ+i}; s_0 = ℓ_2.
pub fn s_at(d: &DegreeData, rho: i64) -> i64 {
    d.sum_a(1, d.t - rho + 1) - (1..=d.t - rho).map(|i| d.b(rho + i)).sum::<i64>()
}

pub fn s_r(d: &DegreeData) -> i64 {
    s_at(d, d.r)
}

pub fn transpose_data(d: &DegreeData) -> DegreeData {
    let t = d.t;
    let cols = d.cols();
    let a: Vec<i64> = (1..=t).map(|i| -d.b(t + 1 - i)).collect();
    let b: Vec<i64> = (1..=cols).map(|j| -d.a(t + d.c - j)).collect();
    DegreeData::raw(cols, 2 - d.c, d.c + d.r - 1, d.n, a, b)
}

/// Largest degree of a minimal generator of I_{t+1−r}.
pub fn mdg(d: &DegreeData) -> i64 {
    d.sum_a(d.c + d.r - 1, d.cols()) - d.sum_b(1, d.t + 1 - d.r)
}

/// Largest degree of a minimal first syzygy of I_{t+1−r}; `None` for a principal ideal.
pub fn mdr(d: &DegreeData) -> Option<i64> {
    let top = d.cols();
    let a_branch = (d.r >= 2).then(|| d.sum_a(d.c + d.r - 1, top) + d.a(top) - d.sum_b(1, d.t + 2 - d.r));
    let b_branch = (d.c + d.r - 2 >= 1).then(|| d.sum_a(d.c + d.r - 2, top) - d.sum_b(1, d.t + 1 - d.r) - d.b(1));
    match (a_branch, b_branch) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, y) => x.or(y),
    }
}

/// κ_1 for c = 1, r = 2.
pub fn kappa_1(d: &DegreeData) -> Result<i64> {
    if d.c != 1 || d.r != 2 {
        return Err(pre("kappa_1 needs c = 1 and r = 2"));
    }
    let (t, n) = (d.t, d.n);
    let s: i64 = (1..=t).map(|i| d.a(i) - d.b(i)).sum();
    let base = d.a(t) - s + n;
    let mut k = 0;
    for j in 1..=t {
        for i in 1..=t {
            for kk in i..=t {
                k += binom_trunc(base - d.b(i) - d.b(kk) + d.a(j), n);
            }
        }
    }
    for i in 1..=t {
        for j in 1..=t {
            for kk in 1..t {
                k -= binom_trunc(base - d.b(i) - d.a(kk) + d.a(j), n);
            }
        }
    }
    for i in 1..t {
        for kk in i + 1..t {
            for j in 1..=t {
                k += binom_trunc(base - d.a(i) - d.a(kk) + d.a(j), n);
            }
        }
    }
    for i in 2..=t {
        k -= binom_trunc(base + d.b(i) - 2 * d.b(1), n);
    }
    Ok(k)
}

/// Twists (with multiplicity) of a graded free resolution, per homological index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiTable {
    pub terms: Vec<Vec<i64>>,
}

impl BettiTable {
    pub fn ranks(&self) -> Vec<usize> {
        self.terms.iter().map(Vec::len).collect()
    }

    fn shifted(mut self, by: i64) -> Self {
        for term in &mut self.terms {
            term.iter_mut().for_each(|d| *d += by);
            term.sort_unstable();
        }
        self
    }
}

pub fn hf_from_betti(bt: &BettiTable, n: i64, v: i64) -> i64 {
    bt.terms
        .iter()
        .enumerate()
        .map(|(k, twists)| {
            let s: i64 = twists.iter().map(|&d| binom_trunc(v - d + n, n)).sum();
            if k % 2 == 0 { s } else { -s }
        })
        .sum()
}

/// Eagon–Northcott resolution of the maximal-minor quotient. Data with c < 1 are
/// transposed first, so the resolved ideal is always that of maximal minors.
pub fn en_betti(d: &DegreeData) -> Result<BettiTable> {
    let d = if d.c < 1 { transpose_data(d) } else { d.clone() };
    let (t, c) = (d.t, d.c);
    let sum_b = d.sum_b(1, t);
    let mut terms = vec![vec![0]];
    for k in 1..=c {
        let mut tw = Vec::new();
        for cols in (1..=d.cols()).combinations((t + k - 1) as usize) {
            let sa: i64 = cols.iter().map(|&j| d.a(j)).sum();
            for rows in (1..=t).combinations_with_replacement((k - 1) as usize) {
                let sb: i64 = rows.iter().map(|&i| d.b(i)).sum();
                tw.push(sa - sb - sum_b);
            }
        }
        tw.sort_unstable();
        terms.push(tw);
    }
    Ok(BettiTable { terms })
}

/// Buchsbaum–Rim resolution of MI = coker(G* → F*), for c ≥ 1.
pub fn br_betti(d: &DegreeData) -> Result<BettiTable> {
    if d.c < 1 {
        return Err(pre("Buchsbaum-Rim resolution needs c >= 1"));
    }
    let t = d.t;
    let sum_b = d.sum_b(1, t);
    let mut terms = vec![d.b.clone(), d.a.clone()];
    for k in 2..=d.c {
        let mut tw = Vec::new();
        for cols in (1..=d.cols()).combinations((t + k - 1) as usize) {
            let sa: i64 = cols.iter().map(|&j| d.a(j)).sum();
            for rows in (1..=t).combinations_with_replacement((k - 2) as usize) {
                let sb: i64 = rows.iter().map(|&i| d.b(i)).sum();
                tw.push(sa - sb - sum_b);
            }
        }
        tw.sort_unstable();
        terms.push(tw);
    }
    Ok(BettiTable { terms })
}

/// Resolution of the dual (B_i ⊗ A_i)^* at the maximal-minor flag stage i = 2−r,
/// with twists already shifted back by ℓ_{2−r}. Terms: ∧^{t−1−k} F* ⊗ S_k(G*).
///
/// The complex has length t−1, which equals the codimension r of the stage only
/// when r = t−1; other shapes are rejected.
pub fn kapp_betti(d: &DegreeData, i: i64) -> Result<BettiTable> {
    if d.r < 2 || i != 2 - d.r {
        return Err(pre("dual resolution needs r >= 2 and stage i = 2-r"));
    }
    if d.r != d.t - 1 {
        return Err(pre("dual resolution is only minimal for r = t-1"));
    }
    let t = d.t;
    let g = t - d.r + 1;
    let ell = d.sum_a(1, g) - d.sum_b(1, t);
    let mut terms = Vec::new();
    for k in 0..t {
        let mut tw = Vec::new();
        for rows in (1..=t).combinations((t - 1 - k) as usize) {
            let sb: i64 = rows.iter().map(|&i| d.b(i)).sum();
            for cols in (1..=g).combinations_with_replacement(k as usize) {
                let sa: i64 = cols.iter().map(|&j| d.a(j)).sum();
                tw.push(sb + sa);
            }
        }
        terms.push(tw);
    }
    Ok(BettiTable { terms }.shifted(ell))
}

/// dim MI_v for MI = coker(φ*). Uses the Buchsbaum–Rim complex for c ≥ 2 and the
/// two-term sequence 0 → G* → F* → MI → 0 (assumed exact) for c ≤ 1.
pub fn dim_mi(d: &DegreeData, v: i64) -> i64 {
    if d.c >= 2 {
        return hf_from_betti(&br_betti(d).expect("c >= 2"), d.n, v);
    }
    two_term(d, &d.a, v)
}

/// True when `dim_mi` relies on generic injectivity of φ*.
pub fn dim_mi_assumes_generic(d: &DegreeData) -> bool {
    d.c <= 1
}

fn two_term(d: &DegreeData, a: &[i64], v: i64) -> i64 {
    let n = d.n;
    d.b.iter().map(|&bi| binom_trunc(v - bi + n, n)).sum::<i64>()
        - a.iter().map(|&aj| binom_trunc(v - aj + n, n)).sum::<i64>()
}

/// dim N_v − dim (N ⊗ B)_v at the maximal-minor stage B = A_{2−r}, N = N_{2−r}.
fn stage_defect(d: &DegreeData, v: i64) -> Result<i64> {
    let g = d.t - d.r + 1;
    let stage = DegreeData::raw(d.t, 2 - d.r, d.r, d.n, d.a[..g as usize].to_vec(), d.b.clone());
    let en = en_betti(&stage)?;
    let dual = kapp_betti(&stage, 2 - d.r)?;
    let n = d.n;
    let hf_b = |u: i64| hf_from_betti(&en, n, u);
    let dim_n = two_term(&stage, &stage.a, v);
    let dim_nb = d.b.iter().map(|&bi| hf_b(v - bi)).sum::<i64>()
        - stage.a.iter().map(|&aj| hf_b(v - aj)).sum::<i64>()
        + hf_from_betti(&dual, n, v);
    Ok(dim_n - dim_nb)
}

/// κ' for c = 3−r, r ≥ 2, a_{t−r+1} < s_r − b_r + b_1, in binomials.
pub fn kappa_prime(d: &DegreeData) -> Result<i64> {
    if d.r < 2 || d.c != 3 - d.r {
        return Err(pre("kappa' needs r >= 2 and c = 3-r"));
    }
    if d.a(d.t - d.r + 1) >= s_r(d) - d.b(d.r) + d.b(1) {
        return Err(pre("kappa' in binomials needs a_{t-r+1} < s_r - b_r + b_1"));
    }
    stage_defect(d, d.a(d.t - d.r + 2))
}

/// κ of the full flag in binomials, valid when
/// a_{t+c−1} < s_r − a_{t−r+1} + a_{t−r+2} − b_r + b_1.
pub fn kappa_flag(d: &DegreeData) -> Result<i64> {
    if d.r < 2 || d.c < 3 - d.r {
        return Err(pre("kappa needs r >= 2 and c >= 3-r"));
    }
    if !kappa_flag_applies(d) {
        return Err(pre("kappa in binomials needs a_{t+c-1} < s_r - a_{t-r+1} + a_{t-r+2} - b_r + b_1"));
    }
    (3 - d.r..=d.c).map(|j| stage_defect(d, d.a(d.t + j - 1))).sum()
}

pub fn kappa_flag_applies(d: &DegreeData) -> bool {
    d.r >= 2
        && d.c >= 3 - d.r
        && d.a(d.cols()) < s_r(d) - d.a(d.t - d.r + 1) + d.a(d.t - d.r + 2) - d.b(d.r) + d.b(1)
}

/// Named hypothesis predicates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Predicates {
    pub a1_gt_bt: bool,
    pub star: bool,
    #[serde(rename = "K_vanish")]
    pub k_vanish: bool,
    #[serde(rename = "Kprime_vanish")]
    pub kprime_vanish: bool,
    pub eg_fiber: bool,
    pub fiber_bounds: bool,
    pub gap_c3: bool,
    pub gap_c4: bool,
    pub flag_gaps: bool,
    pub hom_vanish_neg: bool,
    pub r1_hyp: bool,
    pub tr_hyp: bool,
    pub dims_adequate: bool,
    pub codim_fits: bool,
}

impl Predicates {
    pub fn entries(&self) -> Vec<(&'static str, bool)> {
        vec![
            ("a1_gt_bt", self.a1_gt_bt),
            ("star", self.star),
            ("K_vanish", self.k_vanish),
            ("Kprime_vanish", self.kprime_vanish),
            ("eg_fiber", self.eg_fiber),
            ("fiber_bounds", self.fiber_bounds),
            ("gap_c3", self.gap_c3),
            ("gap_c4", self.gap_c4),
            ("flag_gaps", self.flag_gaps),
            ("hom_vanish_neg", self.hom_vanish_neg),
            ("r1_hyp", self.r1_hyp),
            ("tr_hyp", self.tr_hyp),
            ("dims_adequate", self.dims_adequate),
            ("codim_fits", self.codim_fits),
        ]
    }
}

/// Σ_{i=r}^{t} b_i − Σ_{i=1}^{t−r+2} b_i.
fn b_gap(d: &DegreeData) -> i64 {
    d.sum_b(d.r, d.t) - d.sum_b(1, d.t - d.r + 2)
}

pub fn check_conditions(d: &DegreeData) -> Predicates {
    let (t, c, r) = (d.t, d.c, d.r);
    let top = d.cols();
    let sr = s_r(d);
    let a1_gt_bt = d.a(1) > d.b(t);
    let star = d.a(top) < sr - d.b(r) + d.b(1);
    let k_vanish = c <= 2 || d.a(top) < ell(d, 2);
    let kprime_vanish = r < 2 || -d.b(1) < ell_prime(d, 2);
    let eg_fiber = d.b(t) == d.b(1) && d.a(t - r + 1) < d.a(top);
    let fiber_bounds = r >= 2 && c >= 3 - r && {
        let first = d.b(r) - d.b(1) < (1..=t - r).map(|i| d.a(i) - d.b(r + i)).sum::<i64>() + d.a(top) - d.a(top - 1);
        let second = d.a(t - r + 1) < d.a(top) - (1..=t - r + 1).map(|i| d.b(r + i - 1) - d.b(i)).sum::<i64>();
        first && second
    };
    let gap3 = |d: &DegreeData| r >= 2 && c >= 3 - r && d.a(t - r + 2) > 2 * d.a(t - r + 1) + b_gap(d);
    let gap4 = |d: &DegreeData| {
        r >= 2
            && c >= 4 - r
            && d.a(t - r + 3)
                > d.a(t - r + 1) + d.a(t - r + 2) + b_gap(d) + (d.a(t - r + 2) - d.a(1)).max(d.b(t - r + 2) - d.b(1))
    };
    let gap_c3 = c == 3 - r && gap3(d);
    let gap_c4 = c == 4 - r && gap4(d);
    let flag_gaps = r >= 2 && c >= 4 - r && a1_gt_bt && d.b(r) - d.b(1) < sr - d.a(t - r + 1) && gap3(d) && gap4(d);
    let hom_vanish_neg = c + r - 2 >= 1 && {
        let mdg_b: i64 = (1..=t + 1 - r).map(|i| d.a(c + r - 3 + i) - d.b(i)).sum();
        sr - d.b(r) - d.a(t - r + 1) + d.a(top) >= mdg_b
    };
    let r1_hyp = (2..=t).all(|i| i - 1 > top || d.a(i - 1) >= d.b(i));
    let tr_hyp = (r + 1..=t).all(|i| i - r > top || d.a(i - r) >= d.b(i));
    let dims_adequate = d.dim_a() >= if c == 1 { 3 } else { 2 };
    Predicates {
        a1_gt_bt,
        star,
        k_vanish,
        kprime_vanish,
        eg_fiber,
        fiber_bounds,
        gap_c3,
        gap_c4,
        flag_gaps,
        hom_vanish_neg,
        r1_hyp,
        tr_hyp,
        dims_adequate,
        codim_fits: d.codim_fits(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Proven,
    Conjectural,
    UpperBoundOnly,
    NotApplicable,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corrections {
    #[serde(rename = "K_total", skip_serializing_if = "Option::is_none")]
    pub k_total: Option<i64>,
    #[serde(rename = "Kprime_total", skip_serializing_if = "Option::is_none")]
    pub kprime_total: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_1: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_prime: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimPrediction {
    pub value: i64,
    pub status: Status,
    pub source: String,
    pub corrections: Corrections,
}

/// Hypotheses of the κ_1 formula (c = 1, r = 2), with its fiber equality taken
/// from the sufficient condition b_t = b_1 < a_1, a_{t−1} < a_t.
pub fn kappa1_hypotheses(d: &DegreeData) -> bool {
    let t = d.t;
    d.c == 1
        && d.r == 2
        && t >= 3
        && (1..=t - 2).any(|i| d.a(i) > d.b(i + 2))
        && d.dim_a() >= 2
        && if t == 3 { d.a(1) >= d.b(t) } else { (1..=t - 3).all(|i| d.a(i) >= d.b(i + 3)) }
        && d.b(t) == d.b(1)
        && d.b(1) < d.a(1)
        && d.a(t - 1) < d.a(t)
}

/// Hypotheses of the κ' formula (c = 3−r) in its binomial form.
pub fn kappa_prime_hypotheses(d: &DegreeData) -> bool {
    let t = d.t;
    d.r >= 2
        && d.c == 3 - d.r
        && d.dim_a() >= if d.c <= 0 { 3 } else { 2 }
        && d.a(1) > d.b(t)
        && d.b(t) == d.b(1)
        && d.a(t - d.r + 1) < d.a(t - d.r + 2)
        && d.a(t - d.r + 1) < s_r(d) - d.b(d.r) + d.b(1)
}

pub fn predict_dim(d: &DegreeData) -> DimPrediction {
    let mut corr = Corrections::default();
    if !d.codim_fits() {
        return DimPrediction { value: 0, status: Status::NotApplicable, source: "codimension-exceeds-n".into(), corrections: corr };
    }
    let p = check_conditions(d);
    let lam = lambda_c(d);
    let strict_r1 = d.c != 1 || (2..=d.t).all(|i| d.a(i - 1) > d.b(i));
    if d.r == 1 && p.r1_hyp && strict_r1 && d.n - d.c >= 1 && !(d.c == 1 && d.n == 2) {
        let k = k_total(d);
        corr.k_total = Some(k);
        return DimPrediction { value: lam + k, status: Status::Proven, source: "maximal-minor-equality".into(), corrections: corr };
    }
    if d.c == 2 - d.r && p.tr_hyp && d.n - d.r >= 1 {
        let k = k_prime_total(d);
        corr.kprime_total = Some(k);
        return DimPrediction {
            value: lam + k,
            status: Status::Proven,
            source: "transposed-maximal-minor-equality".into(),
            corrections: corr,
        };
    }
    if kappa1_hypotheses(d) {
        let k1 = kappa_1(d).expect("c = 1, r = 2");
        corr.kappa_1 = Some(k1);
        return DimPrediction { value: lam - k1, status: Status::Proven, source: "kappa1-correction".into(), corrections: corr };
    }
    if kappa_prime_hypotheses(d) {
        if let Ok(kp) = kappa_prime(d) {
            let k = k_prime_total(d);
            corr.kprime_total = Some(k);
            corr.kappa_prime = Some(kp);
            return DimPrediction {
                value: lam + k - kp,
                status: Status::Proven,
                source: "kappa-prime-correction".into(),
                corrections: corr,
            };
        }
    }
    if p.star && p.a1_gt_bt && p.dims_adequate {
        return DimPrediction { value: lam, status: Status::Conjectural, source: "lambda-conjecture".into(), corrections: corr };
    }
    let k = if d.c >= 1 {
        let k = k_total(d);
        corr.k_total = Some(k);
        k
    } else {
        let k = k_prime_total_transposed(d);
        corr.kprime_total = Some(k);
        k
    };
    DimPrediction { value: lam + k, status: Status::UpperBoundOnly, source: "ext1-upper-bound".into(), corrections: corr }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dd(t: i64, c: i64, r: i64, n: i64, a: &[i64], b: &[i64]) -> DegreeData {
        DegreeData::new(t, c, r, n, a.to_vec(), b.to_vec()).unwrap()
    }

    #[test]
    fn binomials() {
        assert_eq!(binom_trunc(8, 8), 1);
        assert_eq!(binom_trunc(7, 8), 0);
        assert_eq!(binom_trunc(9, 8), 9);
        assert_eq!(binom_trunc(-3, 0), 0);
        assert_eq!(binom_trunc(0, 0), 1);
    }

    #[test]
    fn lambda_goldens() {
        assert_eq!(lambda_c(&dd(3, 1, 2, 8, &[1, 1, 1], &[0, 0, 0])), 64);
        assert_eq!(lambda_c(&dd(3, 0, 2, 8, &[1, 1], &[0, 0, 0])), 42);
        assert_eq!(lambda_c(&dd(4, 1, 2, 15, &[1, 1, 1, 1], &[0; 4])), 225);
    }

    #[test]
    fn rejects_bad_data() {
        assert!(DegreeData::new(3, 1, 2, 8, vec![1, 2, 1], vec![0, 0, 0]).is_err());
        assert!(DegreeData::new(3, 1, 3, 8, vec![1, 1, 1], vec![0, 0, 0]).is_err());
        assert!(DegreeData::new(3, 1, 2, 8, vec![0, 0, 0], vec![0, 0, 0]).is_err());
    }

    #[test]
    fn s_values() {
        let d = dd(4, 1, 2, 15, &[1, 1, 2, 2], &[0; 4]);
        assert_eq!(s_at(&d, 2), 4);
        assert_eq!(s_at(&d, 3), 2);
        let lin = dd(5, 1, 2, 20, &[1; 5], &[0; 5]);
        for r in 1..5 {
            assert_eq!(s_at(&lin, r), 5 - r + 1);
        }
    }

    #[test]
    fn transpose_example() {
        let d = dd(3, 3, 2, 20, &[1; 5], &[0; 3]);
        let tr = transpose_data(&d);
        assert_eq!((tr.t, tr.c, tr.r), (5, -1, 4));
        assert_eq!(tr.a, vec![0, 0, 0]);
        assert_eq!(tr.b, vec![-1; 5]);
        assert_eq!(lambda_c(&tr), lambda_c(&d));
    }

    #[test]
    fn kappa_1_example() {
        for n in 7..14 {
            let d = dd(3, 1, 2, n, &[1, 1, 2], &[0; 3]);
            let k = kappa_1(&d).unwrap();
            if n == 8 {
                assert_eq!(k, 6);
            }
            assert_eq!(2 * (lambda_c(&d) - k), 3 * n * n + 17 * n - 24);
        }
        assert_eq!(kappa_1(&dd(3, 1, 2, 8, &[1, 1, 1], &[0; 3])).unwrap(), 0);
        assert!(kappa_1(&dd(3, 2, 2, 8, &[1; 4], &[0; 3])).is_err());
    }

    #[test]
    fn kappa_prime_examples() {
        for n in 8..14 {
            let d = dd(4, 0, 3, n, &[1, 1, 2], &[0; 4]);
            let stage = DegreeData::raw(4, -1, 3, n, vec![1, 1], vec![0; 4]);
            assert_eq!(hf_from_betti(&kapp_betti(&stage, -1).unwrap(), n, 2), 4);
            assert_eq!(kappa_prime(&d).unwrap(), 20);
            assert_eq!(lambda_c(&d) - 20, 2 * n * n + 12 * n - 30);
        }
        assert_eq!(kappa_prime(&dd(3, 1, 2, 8, &[1, 1, 2], &[0; 3])).unwrap(), 6);
    }

    #[test]
    fn mdg_mdr_values() {
        let d = dd(2, 2, 1, 5, &[1, 1, 1], &[0, 0]);
        assert_eq!(mdg(&d), 2);
        assert_eq!(mdr(&d), Some(3));
        let d = dd(3, 1, 1, 5, &[1, 1, 1], &[0; 3]);
        assert_eq!(mdr(&d), None);
        let d = dd(3, 1, 2, 8, &[1, 1, 1], &[0; 3]);
        assert_eq!(mdg(&d), 2);
        assert_eq!(mdr(&d), Some(3));
    }

    #[test]
    fn predicate_examples() {
        let lin = check_conditions(&dd(3, 1, 2, 8, &[1; 3], &[0; 3]));
        assert!(lin.star && lin.k_vanish && !lin.eg_fiber);
        let ex = check_conditions(&dd(3, 1, 2, 8, &[1, 1, 2], &[0; 3]));
        assert!(!ex.star && ex.eg_fiber);
        for (t, r) in [(4, 2), (4, 3), (5, 3)] {
            let cols = t - r + 2;
            let mut a = vec![1; cols as usize];
            *a.last_mut().unwrap() = 3;
            let p = check_conditions(&dd(t, 3 - r, r, 30, &a, &vec![0; t as usize]));
            assert!(p.gap_c3, "t={t} r={r}");
        }
    }

    #[test]
    fn prediction_ladder() {
        let p = predict_dim(&dd(3, 1, 2, 7, &[1; 3], &[0; 3]));
        assert_eq!((p.value, p.status), (55, Status::Conjectural));
        let p = predict_dim(&dd(3, 1, 2, 8, &[1, 1, 2], &[0; 3]));
        assert_eq!(p.status, Status::Proven);
        assert_eq!(2 * p.value, 3 * 64 + 17 * 8 - 24);
        let p = predict_dim(&dd(3, 2, 1, 8, &[1; 4], &[0; 3]));
        assert_eq!((p.value, p.status), (lambda_c(&dd(3, 2, 1, 8, &[1; 4], &[0; 3])), Status::Proven));
        let d = DegreeData::raw(3, 3, 2, 7, vec![1; 5], vec![0; 3]);
        assert_eq!(predict_dim(&d).status, Status::NotApplicable);
        let p = predict_dim(&dd(4, 0, 3, 11, &[1, 1, 2], &[0; 4]));
        assert_eq!((p.value, p.status), (344, Status::Proven));
        let p = predict_dim(&dd(4, 1, 2, 15, &[1, 1, 1, 2], &[0; 4]));
        assert_eq!(p.value, 2 * 225 + 15 * 15 - 12);
    }

    #[test]
    fn resolutions() {
        let en = en_betti(&dd(2, 2, 1, 5, &[1; 3], &[0; 2])).unwrap();
        assert_eq!(en.terms, vec![vec![0], vec![2, 2, 2], vec![3, 3]]);
        let br = br_betti(&dd(3, 2, 1, 8, &[1; 4], &[0; 3])).unwrap();
        assert_eq!(br.terms[0], vec![0, 0, 0]);
        assert_eq!(br.terms[1], vec![1, 1, 1, 1]);
        for v in 0..6 {
            assert_eq!(hf_from_betti(&BettiTable { terms: vec![vec![0]] }, 4, v), binom_trunc(v + 4, 4));
        }
        // twisted cubic style: 2 × n linear, HF = nv + 1
        for n in 2..7 {
            let d = dd(2, n - 1, 1, n, &vec![1; n as usize], &[0, 0]);
            let en = en_betti(&d).unwrap();
            for v in 1..6 {
                assert_eq!(hf_from_betti(&en, n, v), n * v + 1);
            }
        }
        // 2 × (c+1) with one quadric column: degree 2c+1, genus c curve
        for c in 1..5 {
            let mut a = vec![1; (c + 1) as usize];
            a[c as usize] = 2;
            let n = c + 1;
            let d = dd(2, c, 1, n, &a, &[0, 0]);
            let en = en_betti(&d).unwrap();
            for v in 10..14 {
                assert_eq!(hf_from_betti(&en, n, v), (2 * c + 1) * v + 1 - c);
            }
        }
    }

    #[test]
    fn dim_mi_values() {
        let d = dd(3, 1, 2, 8, &[1; 3], &[0; 3]);
        assert_eq!(dim_mi(&d, 1), 24);
        assert_eq!(dim_mi(&d, -1), 0);
        let lhs = dim_mi(&d, 1) - (1..=2).map(|j| binom_trunc(d.a(j) - d.a(3) + 8, 8)).sum::<i64>();
        assert_eq!(lhs, 64 - 42);
    }

    #[test]
    fn uniform_degree_lambda() {
        for t in 2..5 {
            for c in 1..4 {
                for deg in 1..4 {
                    let n = 12;
                    let d = dd(t, c, 1, n, &vec![deg; (t + c - 1) as usize], &vec![0; t as usize]);
                    let m = t + c - 1;
                    assert_eq!(lambda_c(&d), t * m * binom_trunc(n + deg, deg) - t * t - m * m + 1);
                }
            }
        }
    }

    #[test]
    fn codim_three_closed_forms() {
        for t in 2..6 {
            for n in 5..10 {
                let d = dd(t, 3, 1, n, &vec![1; (t + 2) as usize], &vec![0; t as usize]);
                assert_eq!(lambda_c(&d) + k_total(&d), t * (t + 2) * (n + 1) - 2 * t * t - 4 * t - 3);
                for m in 2..5 {
                    let mut a = vec![1; (t + 2) as usize];
                    a[(t + 1) as usize] = m;
                    let d = dd(t, 3, 1, n, &a, &vec![0; t as usize]);
                    let closed = binom_trunc(m + n, n) * t + t * (t + 1) * (n - 1) - 1
                        - (t + 1) * binom_trunc(m + n - 1, n)
                        + binom_trunc(m + n - t - 1, n);
                    assert_eq!(lambda_c(&d) + k_total(&d), closed, "t={t} n={n} m={m}");
                }
            }
        }
    }
}
