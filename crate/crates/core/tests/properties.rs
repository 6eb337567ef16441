use detloci::detschemes::{delete_last_column, has_expected_codim, minors, random_matrix, random_matrix_checked, MatrixSpec};
use detloci::gfpoly::{kernel_mat, monomials, mul_map, random_homogeneous, rank_mat, Mat, PrimeField};
use detloci::gradedhom::{coker_tensor_dim, ext1_mi_dim, hom_dim, ideal_piece, syzygy_generators, Target};
use detloci::invariants::{
    check_conditions, dim_mi, ell, ell_prime, en_betti, hf_from_betti, k_prime, k_term, k_total, lambda_c, mdg, mdr, transpose_data, DegreeData,
};
use detloci::verifier::{run_case, Quantity, RunOptions};
use proptest::prelude::*;

fn field() -> PrimeField {
    PrimeField::default()
}

fn binom(m: i64, k: i64) -> i64 {
    if k < 0 || m < k {
        return 0;
    }
    (0..k).fold(1i128, |r, i| r * (m - i) as i128 / (i + 1) as i128) as i64
}

/// Any valid degree data, including c < 1 and r ≥ 2.
fn any_data() -> impl Strategy<Value = DegreeData> {
    (2..=5i64, -2..=5i64, 1..=20i64, prop::collection::vec(-2..=2i64, 5), prop::collection::vec(-1..=5i64, 9), 0..10usize)
        .prop_filter_map("valid shape", |(t, c, n, mut b, mut a, rsel)| {
            let cols = t + c - 1;
            let rlo = 1.max(2 - c);
            if cols < 1 || rlo > t - 1 {
                return None;
            }
            let r = rlo + (rsel as i64) % (t - rlo);
            b.truncate(t as usize);
            b.sort();
            a.truncate(cols as usize);
            a.sort();
            for i in 0..a.len().min(b.len()) {
                a[i] = a[i].max(b[i]);
            }
            for i in 1..a.len() {
                a[i] = a[i].max(a[i - 1]);
            }
            DegreeData::new(t, c, r, n, a, b).ok()
        })
}

/// Standard determinantal data with positive entry degrees, small enough to compute.
fn small_standard() -> impl Strategy<Value = DegreeData> {
    (2..=3i64, 1..=2i64, 0..=2i64, prop::collection::vec(1..=2i64, 4)).prop_map(|(t, c, extra, mut a)| {
        a.truncate((t + c - 1) as usize);
        a.sort();
        DegreeData::new(t, c, 1, c + extra, a, vec![0; t as usize]).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn lambda_transpose_invariant(d in any_data()) {
        prop_assert_eq!(lambda_c(&transpose_data(&d)), lambda_c(&d));
    }

    #[test]
    fn k_terms_vanish_below_threshold(d in any_data()) {
        if d.c >= 2 && d.a(d.cols()) < ell(&d, 2) {
            for i in 3..=d.c {
                prop_assert_eq!(k_term(&d, i), 0);
            }
        }
        if d.r >= 2 && -d.b(1) < ell_prime(&d, 2) {
            for i in 3..=d.r {
                prop_assert_eq!(k_prime(&d, i), 0);
            }
        }
    }

    #[test]
    fn star_implies_vanishing(d in any_data()) {
        let p = check_conditions(&d);
        if p.star && d.r >= 2 && d.a(d.cols()) >= d.b(d.r - 1) {
            prop_assert!(p.k_vanish);
            prop_assert!(p.kprime_vanish);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_nullity(rows in 1..12usize, cols in 1..12usize, entries in prop::collection::vec(0..101u32, 144), zero_mod in 2..5usize) {
        let f = field();
        let mut m = Mat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                let k = i * cols + j;
                if k % zero_mod != 0 {
                    m.set(i, j, entries[k]);
                }
            }
        }
        let ker = kernel_mat(&f, &m);
        prop_assert_eq!(rank_mat(&f, &m) + ker.len(), cols);
        for v in ker {
            prop_assert!(m.mul_vec(&f, &v).iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn mul_map_composes(n in 1..4usize, e1 in 1..3i64, e2 in 1..3i64, d in 0..3i64, seed in any::<u64>()) {
        let f = field();
        let p = random_homogeneous(&f, e1, n, seed);
        let q = random_homogeneous(&f, e2, n, seed ^ 0x55);
        let pq = p.mul(&f, &q);
        let whole = mul_map(&f, &pq, n, d).unwrap();
        let first = mul_map(&f, &q, n, d).unwrap();
        let second = mul_map(&f, &p, n, d + e2).unwrap();
        prop_assert_eq!(&second.mat.mul(&f, &first.mat), &whole.mat);
        prop_assert_eq!(rank_mat(&f, &whole.mat), monomials(n, d).len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn hilbert_function_matches_resolution(d in small_standard(), seed in 0..1000u64) {
        let (m, _) = random_matrix_checked(&d, field(), seed).unwrap();
        let i = minors(&m, d.t as usize).unwrap();
        let bt = en_betti(&d).unwrap();
        for v in 0..=mdr(&d).unwrap_or(0) + 2 {
            let ideal = ideal_piece(&i, v) as i64;
            prop_assert_eq!(hf_from_betti(&bt, d.n, v), binom(v + d.n, d.n) - ideal, "degree {}", v);
        }
    }

    #[test]
    fn ext1_matches_closed_form(d in small_standard(), seed in 0..1000u64) {
        let (m, _) = random_matrix_checked(&d, field(), seed).unwrap();
        prop_assert_eq!(ext1_mi_dim(&m), lambda_c(&d) + k_total(&d));
    }

    #[test]
    fn minors_degrees_and_deletion(d in small_standard(), seed in 0..1000u64) {
        let m = random_matrix(&d, field(), seed).unwrap();
        let s = d.t as usize;
        let i = minors(&m, s).unwrap();
        for ((rows, cols), g) in i.labels.iter().zip(&i.gens) {
            let want: i64 = cols.iter().map(|&j| d.a[j]).sum::<i64>() - rows.iter().map(|&k| d.b[k]).sum::<i64>();
            prop_assert!(g.is_homogeneous());
            prop_assert_eq!(g.degree(), Some(want));
        }
        prop_assert_eq!(i.degrees().into_iter().max(), Some(mdg(&d)));
        prop_assume!(d.cols() > d.t);
        let last = d.cols() as usize - 1;
        let small = minors(&delete_last_column(&m), s).unwrap();
        let avoiding: Vec<_> = i.labels.iter().zip(&i.gens).filter(|((_, cols), _)| !cols.contains(&last)).map(|(_, g)| g.clone()).collect();
        prop_assert_eq!(small.gens, avoiding);
    }

    #[test]
    fn syzygies_complete_at_bound(d in small_standard(), seed in 0..1000u64) {
        let (m, _) = random_matrix_checked(&d, field(), seed).unwrap();
        let i = minors(&m, d.t as usize).unwrap();
        if let Some(bound) = mdr(&d) {
            let at = syzygy_generators(&i.ideal(), bound).unwrap();
            let beyond = syzygy_generators(&i.ideal(), bound + 2).unwrap();
            prop_assert!(at.verify());
            prop_assert_eq!(at.syz.len(), beyond.syz.len());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn fiber_sequence_left_exact(n in 6..=8i64, seed in 0..1000u64) {
        let d = DegreeData::new(3, 1, 2, n, vec![1; 3], vec![0; 3]).unwrap();
        let opts = RunOptions { quantities: Some(vec![Quantity::NB, Quantity::Fib1, Quantity::HomIbA, Quantity::Fib2]), ..Default::default() };
        let r = run_case(&d, &MatrixSpec::Random { seed }, &opts).unwrap();
        prop_assert!(r.computed["fib1"] + r.computed["homIB_A"] >= r.computed["nB"]);
        prop_assert_eq!(r.computed["fib2"], dim_mi(&d, 1));
    }

    #[test]
    fn reports_are_deterministic(seed in 0..1000u64) {
        let d = DegreeData::new(3, 1, 2, 6, vec![1; 3], vec![0; 3]).unwrap();
        let a = serde_json::to_string(&run_case(&d, &MatrixSpec::Random { seed }, &RunOptions::default()).unwrap()).unwrap();
        let b = serde_json::to_string(&run_case(&d, &MatrixSpec::Random { seed }, &RunOptions::default()).unwrap()).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn random_draws_have_expected_codim() {
    let f = field();
    let d = DegreeData::new(3, 2, 2, 7, vec![1; 4], vec![0; 3]).unwrap();
    let good = (0..20u64).filter(|&s| has_expected_codim(&minors(&random_matrix(&d, f.clone(), s).unwrap(), 2).unwrap(), s).unwrap()).count();
    assert!(good >= 19, "{good} of 20 draws");
}

#[test]
fn engine_mi_piece_matches_closed_form_under_star() {
    let d = DegreeData::new(3, 2, 2, 11, vec![1; 4], vec![0; 3]).unwrap();
    assert!(check_conditions(&d).star);
    let m = detloci::detschemes::generic_matrix(&d, field()).unwrap();
    let flag = detloci::detschemes::build_flag(&m, 2).unwrap();
    let a = flag.stage(2).ideal();
    assert_eq!(coker_tensor_dim(&m, Some(&a), 1), dim_mi(&d, 1));
    let b = flag.stage(1);
    assert!(hom_dim(&b.syzygies(), Target::Quotient(&b.ideal()), 0).unwrap() > 0);
}
