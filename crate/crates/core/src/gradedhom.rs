//! Graded pieces of ideals and modules by per-degree linear algebra: Hilbert
//! functions, minimal generators, first syzygies, Hom dimensions and
//! cokernel pieces. No Gröbner bases; every quantity is one graded piece.

use crate::detschemes::{HomMatrix, MinorsIdeal};
use crate::error::{pre, Result};
use crate::gfpoly::{key_add, key_sub, mono_mul, Echelon, GradedRing, Key, KeyBasis, Mono, MultiPoly};
use rayon::prelude::*;
use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

/// Graded piece of an ideal at one key: reduced echelon basis in monomial coordinates.
#[derive(Debug)]
pub struct Piece {
    pub basis: Option<Arc<KeyBasis>>,
    pub span: Echelon,
}

impl Piece {
    pub fn dim(&self) -> usize {
        self.span.rank()
    }

    pub fn ambient(&self) -> usize {
        self.basis.as_ref().map_or(0, |b| b.len())
    }

    pub fn codim(&self) -> usize {
        self.ambient() - self.dim()
    }
}

/// Homogeneous ideal with a write-once cache of graded pieces.
#[derive(Debug)]
pub struct Ideal {
    pub ring: Arc<GradedRing>,
    pub gens: Vec<MultiPoly>,
    pub keys: Vec<Key>,
    cache: Mutex<HashMap<Key, Arc<Piece>>>,
}

impl Ideal {
    pub fn new(ring: Arc<GradedRing>, gens: Vec<MultiPoly>, keys: Vec<Key>) -> Self {
        assert_eq!(gens.len(), keys.len());
        Ideal { ring, gens, keys, cache: Mutex::new(HashMap::new()) }
    }

    /// Ideal from homogeneous generators, deriving keys from the ring grading.
    pub fn from_gens(ring: Arc<GradedRing>, gens: Vec<MultiPoly>) -> Result<Self> {
        let gens: Vec<MultiPoly> = gens.into_iter().filter(|g| !g.is_zero()).collect();
        let keys = gens
            .iter()
            .map(|g| ring.poly_key(g).ok_or_else(|| pre(format!("generator {g} is not homogeneous"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Ideal::new(ring, gens, keys))
    }

    pub fn zero(ring: Arc<GradedRing>) -> Self {
        Ideal::new(ring, Vec::new(), Vec::new())
    }

    /// Span of all monomial multiples of the generators at `key`.
    pub fn piece(&self, key: &[i32]) -> Arc<Piece> {
        if let Some(p) = self.cache.lock().unwrap().get(key) {
            return p.clone();
        }
        let piece = Arc::new(span_piece(&self.ring, self.gens.iter().zip(&self.keys), key));
        self.cache.lock().unwrap().entry(key.to_vec()).or_insert(piece).clone()
    }

    pub fn dim(&self, d: i64) -> usize {
        if d < 0 {
            return 0;
        }
        let b = self.ring.buckets(d);
        b.keys.par_iter().map(|k| self.piece(k).dim()).sum()
    }

    /// Normal form modulo the piece at `key` (zero in every pivot column).
    pub fn reduce(&self, key: &[i32], v: &mut [u32]) {
        self.piece(key).span.reduce(&self.ring.field, v);
    }
}

fn span_piece<'a>(ring: &GradedRing, gens: impl Iterator<Item = (&'a MultiPoly, &'a Key)>, key: &[i32]) -> Piece {
    let Some(basis) = ring.basis(key) else {
        return Piece { basis: None, span: Echelon::new(0) };
    };
    let mut span = Echelon::new(basis.len());
    'outer: for (g, gk) in gens {
        let diff = key_sub(key, gk);
        if diff[0] < 0 {
            continue;
        }
        let Some(mb) = ring.basis(&diff) else { continue };
        for &m in &mb.monos {
            let mut v = vec![0u32; basis.len()];
            ring.add_product_coords(&mut v, m, 1, g, &basis);
            span.insert(&ring.field, v);
            if span.rank() == basis.len() {
                break 'outer;
            }
        }
    }
    Piece { basis: Some(basis), span }
}

/// Dimension of (I)_d.
pub fn ideal_piece(i: &MinorsIdeal, d: i64) -> usize {
    i.ideal().dim(d)
}

/// dim (R/I)_d.
pub fn hf_quotient(i: &MinorsIdeal, d: i64) -> i64 {
    hf_ideal_quotient(&i.ideal(), d)
}

pub fn hf_ideal_quotient(i: &Ideal, d: i64) -> i64 {
    if d < 0 {
        return 0;
    }
    let b = i.ring.buckets(d);
    b.keys.par_iter().map(|k| i.piece(k).codim() as i64).sum()
}

/// dim(I_A)_d − dim(I_B)_d, after checking that I_B ⊆ I_A.
pub fn subquotient_piece(big: &Ideal, small: &Ideal, d: i64) -> Result<i64> {
    check_inclusion(big, small)?;
    Ok(big.dim(d) as i64 - small.dim(d) as i64)
}

pub fn check_inclusion(big: &Ideal, small: &Ideal) -> Result<()> {
    for (g, k) in small.gens.iter().zip(&small.keys) {
        let p = big.piece(k);
        let Some(basis) = &p.basis else { return Err(pre("subquotient needs I_B ⊆ I_A")) };
        if !p.span.contains(&big.ring.field, &big.ring.coords(g, basis)) {
            return Err(pre(format!("generator {g} of I_B is not in I_A")));
        }
    }
    Ok(())
}

/// One first syzygy Σ_k coeffs_k·e_k of multidegree `key`.
#[derive(Clone, Debug)]
pub struct Syzygy {
    pub key: Key,
    pub coeffs: Vec<(usize, MultiPoly)>,
}

impl Syzygy {
    pub fn degree(&self) -> i64 {
        self.key[0] as i64
    }
}

/// Minimal generators with their first syzygies up to degree `bound`.
#[derive(Clone, Debug)]
pub struct SyzygyBlock {
    pub ring: Arc<GradedRing>,
    pub gens: Vec<MultiPoly>,
    pub keys: Vec<Key>,
    pub syz: Vec<Syzygy>,
    pub bound: i64,
    pub complete: bool,
}

impl SyzygyBlock {
    pub fn gen_degrees(&self) -> Vec<i64> {
        self.keys.iter().map(|k| k[0] as i64).collect()
    }

    pub fn syz_degrees(&self) -> Vec<i64> {
        self.syz.iter().map(Syzygy::degree).collect()
    }

    /// Whether every syzygy annihilates the generators.
    pub fn verify(&self) -> bool {
        let f = &self.ring.field;
        self.syz.iter().all(|s| {
            let total = s.coeffs.iter().fold(MultiPoly::zero(self.ring.nvars()), |acc, (k, c)| acc.add(f, &c.mul(f, &self.gens[*k])));
            total.is_zero()
        })
    }
}

/// Drops generators lying in the span of the others' multiples, lowest degrees first.
pub fn minimal_generators(ring: &GradedRing, gens: &[MultiPoly], keys: &[Key]) -> (Vec<MultiPoly>, Vec<Key>) {
    let mut order: Vec<usize> = (0..gens.len()).filter(|&i| !gens[i].is_zero()).collect();
    order.sort_by_key(|&i| (keys[i][0], i));
    let mut kept: Vec<usize> = Vec::new();
    let mut spans: HashMap<Key, Echelon> = HashMap::new();
    for &i in &order {
        let key = &keys[i];
        let span = spans.entry(key.clone()).or_insert_with(|| {
            let lower = kept.iter().filter(|&&k| keys[k][0] < key[0]).map(|&k| (&gens[k], &keys[k]));
            span_piece(ring, lower, key).span
        });
        let basis = ring.basis(key).expect("generator key has monomials");
        if span.insert(&ring.field, ring.coords(&gens[i], &basis)) {
            kept.push(i);
        }
    }
    (kept.iter().map(|&i| gens[i].clone()).collect(), kept.iter().map(|&i| keys[i].clone()).collect())
}

/// Minimal generators of the first syzygy module in degrees ≤ `bound`.
/// The completeness flag is left to the caller, which knows the bound's provenance.
pub fn syzygy_generators(i: &Ideal, bound: i64) -> Result<SyzygyBlock> {
    let ring = i.ring.clone();
    let (gens, keys) = minimal_generators(&ring, &i.gens, &i.keys);
    let top = keys.iter().map(|k| k[0] as i64).max().unwrap_or(0);
    if bound < top {
        return Err(pre(format!("syzygy bound {bound} below generator degree {top}")));
    }
    let mut syz: Vec<Syzygy> = Vec::new();
    let low = keys.iter().map(|k| k[0] as i64).min().unwrap_or(0);
    for d in low + 1..=bound {
        let mut cand: BTreeSet<Key> = BTreeSet::new();
        for k in &keys {
            let e = d - k[0] as i64;
            if e < 0 {
                continue;
            }
            for mk in &ring.buckets(e).keys {
                cand.insert(key_add(mk, k));
            }
        }
        let cand: Vec<Key> = cand.into_iter().collect();
        let found: Vec<Vec<Syzygy>> = cand.par_iter().map(|e| syzygies_at(&ring, &gens, &keys, &syz, e)).collect();
        syz.extend(found.into_iter().flatten());
    }
    Ok(SyzygyBlock { ring, gens, keys, syz, bound, complete: false })
}

fn syzygies_at(ring: &GradedRing, gens: &[MultiPoly], keys: &[Key], lower: &[Syzygy], e: &Key) -> Vec<Syzygy> {
    let f = &ring.field;
    let Some(target) = ring.basis(e) else { return Vec::new() };
    let mut domain: Vec<(usize, Mono)> = Vec::new();
    for (k, gk) in keys.iter().enumerate() {
        let diff = key_sub(e, gk);
        if diff[0] < 0 {
            continue;
        }
        if let Some(mb) = ring.basis(&diff) {
            domain.extend(mb.monos.iter().map(|&m| (k, m)));
        }
    }
    if domain.len() < 2 {
        return Vec::new();
    }
    let index: HashMap<(usize, Mono), usize> = domain.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let mut mat = crate::gfpoly::Mat::zeros(target.len(), domain.len());
    for (col, &(k, m)) in domain.iter().enumerate() {
        for &(gm, c) in &gens[k].terms {
            let row = target.pos(mono_mul(m, gm));
            mat.set(row, col, f.add(mat.get(row, col), c));
        }
    }
    let kernel = crate::gfpoly::kernel_mat(f, &mat);
    if kernel.is_empty() {
        return Vec::new();
    }
    let mut old = Echelon::new(domain.len());
    for s in lower {
        let diff = key_sub(e, &s.key);
        if diff[0] < 1 {
            continue;
        }
        let Some(mb) = ring.basis(&diff) else { continue };
        for &m in &mb.monos {
            let mut v = vec![0u32; domain.len()];
            for (k, c) in &s.coeffs {
                for &(cm, cc) in &c.terms {
                    let idx = index[&(*k, mono_mul(m, cm))];
                    v[idx] = f.add(v[idx], cc);
                }
            }
            old.insert(f, v);
            if old.rank() == kernel.len() {
                return Vec::new();
            }
        }
    }
    let mut out = Vec::new();
    for v in kernel {
        if !old.insert(f, v.clone()) {
            continue;
        }
        let mut coeffs: Vec<(usize, Vec<(Mono, u32)>)> = Vec::new();
        for (idx, &x) in v.iter().enumerate() {
            if x == 0 {
                continue;
            }
            let (k, m) = domain[idx];
            match coeffs.iter_mut().find(|(kk, _)| *kk == k) {
                Some((_, t)) => t.push((m, x)),
                None => coeffs.push((k, vec![(m, x)])),
            }
        }
        let coeffs = coeffs.into_iter().map(|(k, t)| (k, MultiPoly::from_terms(f, ring.nvars(), t))).collect();
        out.push(Syzygy { key: e.clone(), coeffs });
    }
    out
}

/// Target module of a Hom computation, always of the form (K+J)/J inside R/J.
#[derive(Clone, Copy)]
pub enum Target<'a> {
    /// R/J.
    Quotient(&'a Ideal),
    /// K/J with J ⊆ K.
    Subquotient { big: &'a Ideal, small: &'a Ideal },
    /// K inside R.
    Ideal(&'a Ideal),
}

impl Target<'_> {
    fn modulus(&self) -> Option<&Ideal> {
        match self {
            Target::Quotient(j) => Some(j),
            Target::Subquotient { small, .. } => Some(small),
            Target::Ideal(_) => None,
        }
    }
}

/// Basis of the target piece at a key as vectors in monomial coordinates,
/// each reduced modulo J.
struct TargetPiece {
    basis: Option<Arc<KeyBasis>>,
    vectors: Vec<Vec<u32>>,
}

fn target_piece(ring: &GradedRing, t: &Target<'_>, key: &[i32]) -> TargetPiece {
    let Some(basis) = ring.basis(key) else { return TargetPiece { basis: None, vectors: Vec::new() } };
    let n = basis.len();
    let unit = |c: usize| {
        let mut v = vec![0u32; n];
        v[c] = 1;
        v
    };
    let vectors = match t {
        Target::Quotient(j) => j.piece(key).span.complement().into_iter().map(unit).collect(),
        Target::Ideal(k) => k.piece(key).span.rows().to_vec(),
        Target::Subquotient { big, small } => {
            let jp = small.piece(key);
            let mut e = Echelon::new(n);
            for row in big.piece(key).span.rows() {
                let mut v = row.clone();
                jp.span.reduce(&ring.field, &mut v);
                e.insert(&ring.field, v);
            }
            e.rows().to_vec()
        }
    };
    TargetPiece { basis: Some(basis), vectors }
}

/// dim Hom_R(I, M)_v from minimal generators and first syzygies of I.
pub fn hom_dim(block: &SyzygyBlock, target: Target<'_>, v: i64) -> Result<i64> {
    if !block.complete {
        return Err(pre("syzygies are not known to be complete; use hom_dim_truncated"));
    }
    Ok(hom_dim_truncated(block, target, v))
}

/// Same as `hom_dim`, valid only up to the syzygy degree bound of the block.
pub fn hom_dim_truncated(block: &SyzygyBlock, target: Target<'_>, v: i64) -> i64 {
    let ring = &block.ring;
    let mut shifts: BTreeSet<Key> = BTreeSet::new();
    for k in &block.keys {
        let d = k[0] as i64 + v;
        if d < 0 {
            continue;
        }
        for mk in &ring.buckets(d).keys {
            shifts.insert(key_sub(mk, k));
        }
    }
    let cache: Mutex<HashMap<Key, Arc<TargetPiece>>> = Mutex::new(HashMap::new());
    let piece = |key: &Key| -> Arc<TargetPiece> {
        if let Some(p) = cache.lock().unwrap().get(key) {
            return p.clone();
        }
        let p = Arc::new(target_piece(ring, &target, key));
        cache.lock().unwrap().entry(key.clone()).or_insert(p).clone()
    };
    let shifts: Vec<Key> = shifts.into_iter().collect();
    shifts.par_iter().map(|delta| hom_at_shift(block, &target, delta, &piece)).sum()
}

fn hom_at_shift(block: &SyzygyBlock, target: &Target<'_>, delta: &Key, piece: &(dyn Fn(&Key) -> Arc<TargetPiece> + Sync)) -> i64 {
    let ring = &block.ring;
    let f = &ring.field;
    let mut offsets = Vec::with_capacity(block.keys.len());
    let mut blocks = Vec::with_capacity(block.keys.len());
    let mut unknowns = 0usize;
    for k in &block.keys {
        let p = piece(&key_add(k, delta));
        offsets.push(unknowns);
        unknowns += p.vectors.len();
        blocks.push(p);
    }
    if unknowns == 0 {
        return 0;
    }
    let modulus = target.modulus();
    let mut rows = Echelon::new(unknowns);
    for s in &block.syz {
        if rows.rank() == unknowns {
            break;
        }
        let ekey = key_add(&s.key, delta);
        let Some(ebasis) = ring.basis(&ekey) else { continue };
        let mut cols: Vec<(usize, Vec<u32>)> = Vec::new();
        for (k, c) in &s.coeffs {
            let src = &blocks[*k];
            let Some(sbasis) = &src.basis else { continue };
            for (l, vec) in src.vectors.iter().enumerate() {
                let mut out = vec![0u32; ebasis.len()];
                for (idx, &x) in vec.iter().enumerate() {
                    if x == 0 {
                        continue;
                    }
                    let m = sbasis.monos[idx];
                    for &(cm, cc) in &c.terms {
                        let pos = ebasis.pos(mono_mul(m, cm));
                        out[pos] = f.add(out[pos], f.mul(x, cc));
                    }
                }
                if let Some(j) = modulus {
                    j.reduce(&ekey, &mut out);
                }
                cols.push((offsets[*k] + l, out));
            }
        }
        for pos in 0..ebasis.len() {
            let mut row = vec![0u32; unknowns];
            let mut nonzero = false;
            for (c, col) in &cols {
                if col[pos] != 0 {
                    row[*c] = f.add(row[*c], col[pos]);
                    nonzero = true;
                }
            }
            if nonzero {
                rows.insert(f, row);
                if rows.rank() == unknowns {
                    break;
                }
            }
        }
    }
    (unknowns - rows.rank()) as i64
}

/// dim (coker(φ*) ⊗ R/J)_v; `over = None` gives dim coker(φ*)_v itself.
pub fn coker_tensor_dim(pres: &HomMatrix, over: Option<&Ideal>, v: i64) -> i64 {
    let ring = &pres.ring;
    let mut keys: BTreeSet<Key> = BTreeSet::new();
    for rk in &pres.row_keys {
        let d = v - rk[0] as i64;
        if d < 0 {
            continue;
        }
        for mk in &ring.buckets(d).keys {
            keys.insert(key_add(mk, rk));
        }
    }
    let keys: Vec<Key> = keys.into_iter().collect();
    keys.par_iter().map(|k| coker_at_key(pres, over, k)).sum()
}

fn quotient_basis(ring: &GradedRing, over: Option<&Ideal>, key: &[i32]) -> Option<(Arc<KeyBasis>, Vec<usize>)> {
    let basis = ring.basis(key)?;
    let std: Vec<usize> = match over {
        Some(j) => j.piece(key).span.complement(),
        None => (0..basis.len()).collect(),
    };
    Some((basis, std))
}

fn coker_at_key(pres: &HomMatrix, over: Option<&Ideal>, key: &Key) -> i64 {
    let ring = &pres.ring;
    let f = &ring.field;
    let targets: Vec<Option<(Arc<KeyBasis>, Vec<usize>)>> = pres.row_keys.iter().map(|rk| quotient_basis(ring, over, &key_sub(key, rk))).collect();
    let mut offsets = Vec::new();
    let mut total = 0usize;
    for t in &targets {
        offsets.push(total);
        total += t.as_ref().map_or(0, |(_, s)| s.len());
    }
    if total == 0 {
        return 0;
    }
    let mut image = Echelon::new(total);
    for (j, ck) in pres.col_keys.iter().enumerate() {
        let Some((sbasis, sstd)) = quotient_basis(ring, over, &key_sub(key, ck)) else { continue };
        for &u in &sstd {
            let m = sbasis.monos[u];
            let mut v = vec![0u32; total];
            for (i, t) in targets.iter().enumerate() {
                let entry = &pres.entries[i][j];
                let Some((tbasis, tstd)) = t else { continue };
                if entry.is_zero() {
                    continue;
                }
                let tkey = key_sub(key, &pres.row_keys[i]);
                let mut w = vec![0u32; tbasis.len()];
                ring.add_product_coords(&mut w, m, 1, entry, tbasis);
                if let Some(jd) = over {
                    jd.reduce(&tkey, &mut w);
                }
                for (q, &c) in tstd.iter().enumerate() {
                    v[offsets[i] + q] = w[c];
                }
            }
            image.insert(f, v);
            if image.rank() == total {
                return 0;
            }
        }
    }
    (total - image.rank()) as i64
}

/// dim_0 Ext¹(MI, MI) = Σ_j dim MI_{a_j} − Σ_i dim MI_{b_i} + 1, assuming Hom(MI, MI) ≅ A.
pub fn ext1_mi_dim(m: &HomMatrix) -> i64 {
    let mi = |v: i64| coker_tensor_dim(m, None, v);
    m.data.a.iter().map(|&a| mi(a)).sum::<i64>() - m.data.b.iter().map(|&b| mi(b)).sum::<i64>() + 1
}
