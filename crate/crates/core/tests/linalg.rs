use dcsit_core::channel::gaussian_matrix;
use dcsit_core::linalg::{block_diag, intersect, max_principal_angle, null_space, rank_tol, row_space, CMatrix, Subspace, Tolerance};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random `rows x cols` matrix of rank `min(rank, rows, cols)`.
fn low_rank(rows: usize, cols: usize, rank: usize, r: &mut ChaCha8Rng) -> CMatrix {
    gaussian_matrix(rows, rank, r) * gaussian_matrix(rank, cols, r)
}

fn random_subspace(dim: usize, ambient: usize, r: &mut ChaCha8Rng) -> Subspace {
    row_space(&gaussian_matrix(dim, ambient, r), Tolerance::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn block_diagonal_rank_adds(seed in any::<u64>(), ra in 0usize..5, ca in 1usize..6, ka in 0usize..5, rb in 0usize..5, cb in 1usize..6, kb in 0usize..5) {
        let tol = Tolerance::default();
        let mut r = rng(seed);
        let a = low_rank(ra, ca, ka, &mut r);
        let b = low_rank(rb, cb, kb, &mut r);
        let both = block_diag(&[&a, &b]);
        prop_assert_eq!(rank_tol(&both, tol).unwrap(), rank_tol(&a, tol).unwrap() + rank_tol(&b, tol).unwrap());
    }

    #[test]
    fn nullity_plus_rank_is_column_count(seed in any::<u64>(), rows in 0usize..7, cols in 1usize..8, rank in 0usize..7) {
        let tol = Tolerance::default();
        let m = low_rank(rows, cols, rank, &mut rng(seed));
        let kernel = null_space(&m, tol).unwrap();
        prop_assert_eq!(kernel.dim() + rank_tol(&m, tol).unwrap(), cols);
        if kernel.dim() > 0 {
            let image = &m * kernel.basis().transpose();
            prop_assert!(image.norm() <= 1e-8 * (1.0 + m.norm()));
        }
    }

    #[test]
    fn intersection_members_lie_in_every_input(seed in any::<u64>(), n in 3usize..8, da in 1usize..8, db in 1usize..8) {
        let tol = Tolerance::default();
        let mut r = rng(seed);
        let (da, db) = (da.min(n), db.min(n));
        let a = random_subspace(da, n, &mut r);
        let b = random_subspace(db, n, &mut r);
        let both = intersect(&[&a, &b], tol).unwrap();
        for k in 0..both.dim() {
            let mut x = both.basis().rows(k, 1).into_owned();
            let mix = gaussian_matrix(1, 1, &mut r)[(0, 0)];
            x *= mix / mix.norm();
            let line = row_space(&x, tol).unwrap();
            prop_assert!(both.contains(&line, tol));
            prop_assert!(a.contains(&line, tol) && b.contains(&line, tol));
        }
    }

    #[test]
    fn intersection_ignores_input_order(seed in any::<u64>(), n in 4usize..8) {
        let tol = Tolerance::default();
        let mut r = rng(seed);
        let a = random_subspace(n - 1, n, &mut r);
        let b = random_subspace(n - 1, n, &mut r);
        let c = random_subspace(n - 1, n, &mut r);
        let abc = intersect(&[&a, &b, &c], tol).unwrap();
        let cab = intersect(&[&c, &a, &b], tol).unwrap();
        let bca = intersect(&[&b, &c, &a], tol).unwrap();
        prop_assert_eq!(abc.dim(), n - 3);
        prop_assert_eq!(abc.dim(), cab.dim());
        prop_assert_eq!(abc.dim(), bca.dim());
        prop_assert!(max_principal_angle(&abc, &cab).unwrap() < 1e-8);
        prop_assert!(max_principal_angle(&abc, &bca).unwrap() < 1e-8);
    }
}

#[test]
fn generic_intersection_dimension_over_seeds() {
    let tol = Tolerance::default();
    for seed in 0..100u64 {
        let mut r = rng(seed);
        for (n, da, db) in [(6, 4, 4), (7, 5, 3), (10, 6, 7), (5, 5, 2)] {
            let a = random_subspace(da, n, &mut r);
            let b = random_subspace(db, n, &mut r);
            assert_eq!(intersect(&[&a, &b], tol).unwrap().dim(), da + db - n, "seed {seed} ({n},{da},{db})");
        }
    }
}

#[test]
fn disjoint_generic_subspaces_meet_in_zero() {
    let tol = Tolerance::default();
    let mut r = rng(7);
    let a = random_subspace(2, 6, &mut r);
    let b = random_subspace(3, 6, &mut r);
    let both = intersect(&[&a, &b], tol).unwrap();
    assert_eq!((both.dim(), both.ambient()), (0, 6));
}
