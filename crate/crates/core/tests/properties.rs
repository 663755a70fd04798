use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use concentro::bounds::{eta_tail, gaussian_moment_bound};
use concentro::graphs::{counting_polynomial, sample_graph, triangle_count_trace, EdgeIndex, GraphSpec};
use concentro::montecarlo::{chunked_samples, MomentEstimate};
use concentro::norms::mixed_norm;
use concentro::partitions::{enumerate_partitions, SetPartition, SplitPartition};
use concentro::poly::expected_derivative_tensor;
use concentro::rmt::{hoffman_wielandt_check, linstat_tail_bound, semicircle_integral};
use concentro::tensor::{apply_mask, contract, hadamard_rank_one, IndexMask};
use concentro::{norm_j, Law, NormOptions, Polynomial, ProductDistribution, Tensor};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn tensor(order: usize, dim: usize, r: &mut ChaCha8Rng) -> Tensor {
    Tensor::from_fn(order, dim, |_| r.sample(StandardNormal)).unwrap()
}

fn pick(d: usize, r: &mut ChaCha8Rng) -> SetPartition {
    let all = enumerate_partitions(d).unwrap();
    all[r.random_range(0..all.len())].clone()
}

fn norm(a: &Tensor, j: &SetPartition) -> f64 {
    norm_j(a, j, &NormOptions { restarts: 16, ..Default::default() }).unwrap().value
}

fn random_poly(nvars: usize, max_deg: usize, r: &mut ChaCha8Rng) -> Polynomial {
    let mut f = Polynomial::zero(nvars);
    for _ in 0..r.random_range(1..=5) {
        let mut m: Vec<(usize, u32)> = Vec::new();
        for _ in 0..r.random_range(1..=max_deg) {
            let v = r.random_range(0..nvars);
            match m.iter_mut().find(|e| e.0 == v) {
                Some(e) => e.1 += 1,
                None => m.push((v, 1)),
            }
        }
        m.sort_unstable();
        f.add_term(m, r.random_range(-2.0..2.0)).unwrap();
    }
    f
}

fn dims() -> impl Strategy<Value = (u64, usize, usize)> {
    (any::<u64>(), 2usize..=3, 2usize..=3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn partitions_cover_and_canonicalize(d in 1usize..=6) {
        for j in enumerate_partitions(d).unwrap() {
            let mut seen: Vec<usize> = j.blocks().concat();
            seen.sort_unstable();
            prop_assert_eq!(seen, (0..d).collect::<Vec<_>>());
            prop_assert_eq!(j.canonicalize(), j.clone());
            let text = j.to_string();
            prop_assert_eq!(text.parse::<SetPartition>().unwrap(), j);
        }
    }

    #[test]
    fn masks_are_idempotent_and_level_sets_tile((seed, d, m) in dims()) {
        let mut r = rng(seed);
        let a = tensor(d, m, &mut r);
        let k = pick(d, &mut r);
        for mask in [IndexMask::LevelSet(k), IndexMask::OffDiagonal, IndexMask::GeneralizedDiagonal(vec![0, d - 1])] {
            let once = apply_mask(&a, &mask).unwrap();
            prop_assert_eq!(apply_mask(&once, &mask).unwrap(), once);
        }
        let mut sum = Tensor::zeros(d, m).unwrap();
        for k in enumerate_partitions(d).unwrap() {
            sum = sum.axpby(1.0, &apply_mask(&a, &IndexMask::LevelSet(k)).unwrap(), 1.0).unwrap();
        }
        prop_assert_eq!(sum, a);
    }

    #[test]
    fn contraction_is_multilinear((seed, d, m) in dims(), alpha in -3.0f64..3.0, beta in -3.0f64..3.0) {
        let mut r = rng(seed);
        let a = tensor(d, m, &mut r);
        let j = pick(d, &mut r);
        let mut xs: Vec<Vec<f64>> =
            j.blocks().iter().map(|b| (0..m.pow(b.len() as u32)).map(|_| r.sample(StandardNormal)).collect()).collect();
        let y: Vec<f64> = (0..xs[0].len()).map(|_| r.sample(StandardNormal)).collect();
        let base = contract(&a, &j, &xs).unwrap();
        let x0 = std::mem::replace(&mut xs[0], y);
        let other = contract(&a, &j, &xs).unwrap();
        xs[0] = x0.iter().zip(&xs[0]).map(|(u, v)| alpha * u + beta * v).collect();
        let mixed = contract(&a, &j, &xs).unwrap();
        let want = alpha * base + beta * other;
        prop_assert!((mixed - want).abs() <= 1e-12 * (1.0 + (alpha * base).abs() + (beta * other).abs()));
    }

    #[test]
    fn norms_grow_as_blocks_merge((seed, d, m) in dims()) {
        let mut r = rng(seed);
        let a = tensor(d, m, &mut r);
        let parts = enumerate_partitions(d).unwrap();
        let frob = a.frobenius();
        for fine in &parts {
            let nf = norm(&a, fine);
            prop_assert!(nf <= frob + 1e-9);
            for coarse in parts.iter().filter(|c| fine.refines(c)) {
                prop_assert!(nf <= norm(&a, coarse) + 1e-8);
            }
        }
    }

    #[test]
    fn rank_one_weights_scale_norms((seed, d, m) in dims()) {
        let mut r = rng(seed);
        let a = tensor(d, m, &mut r);
        let j = pick(d, &mut r);
        let vs: Vec<Vec<f64>> = (0..d).map(|_| (0..m).map(|_| r.random_range(-2.0..2.0)).collect()).collect();
        let scale: f64 = vs.iter().map(|v| v.iter().fold(0.0f64, |x, y| x.max(y.abs()))).product();
        prop_assert!(norm(&hadamard_rank_one(&a, &vs).unwrap(), &j) <= norm(&a, &j) * scale + 1e-8);
    }

    #[test]
    fn diagonal_selection_does_not_grow_norms((seed, d, m) in dims()) {
        let mut r = rng(seed);
        let a = tensor(d, m, &mut r);
        let j = pick(d, &mut r);
        let diag = apply_mask(&a, &IndexMask::GeneralizedDiagonal(vec![d - 2, d - 1])).unwrap();
        prop_assert!(norm(&diag, &j) <= norm(&a, &j) + 1e-8);
    }

    #[test]
    fn level_set_norms_are_controlled((seed, d, m) in dims()) {
        let mut r = rng(seed);
        let a = tensor(d, m, &mut r);
        let j = pick(d, &mut r);
        let k = pick(d, &mut r);
        let factor = 2f64.powi((k.num_blocks() * (k.num_blocks() - 1) / 2) as i32);
        let masked = apply_mask(&a, &IndexMask::LevelSet(k)).unwrap();
        prop_assert!(norm(&masked, &j) <= factor * norm(&a, &j) + 1e-8);
    }

    #[test]
    fn relabeling_axes_preserves_exact_norms(seed in any::<u64>(), d in 2usize..=4) {
        let mut r = rng(seed);
        let a = tensor(d, 2, &mut r);
        let mut perm: Vec<usize> = (0..d).collect();
        for i in (1..d).rev() {
            perm.swap(i, r.random_range(0..=i));
        }
        let b = a.permute_axes(&perm).unwrap();
        for j in enumerate_partitions(d).unwrap().into_iter().filter(|j| j.num_blocks() <= 2) {
            prop_assert!((norm(&a, &j) - norm(&b, &j.permuted(&perm))).abs() <= 1e-8);
        }
    }

    #[test]
    fn mixed_norm_at_alpha_two_merges_blocks(seed in any::<u64>(), d in 1usize..=3) {
        let mut r = rng(seed);
        let a = tensor(d, 3, &mut r);
        let j = pick(d, &mut r);
        let blocks = j.blocks().to_vec();
        let cut = r.random_range(0..=blocks.len());
        let split = SplitPartition::new(d, blocks[..cut].to_vec(), blocks[cut..].to_vec()).unwrap();
        if split.merged().num_blocks() <= 2 {
            let factor: usize = split.outer().iter().map(Vec::len).product();
            let want = factor as f64 * norm(&a, &split.merged());
            let got = mixed_norm(&a, &split, 2.0, &NormOptions::default()).unwrap();
            prop_assert!((got - want).abs() <= 1e-8 * want.max(1.0));
        }
    }

    #[test]
    fn derivative_tensors_are_symmetric_and_linear(seed in any::<u64>(), n in 1usize..=3, d in 1usize..=3) {
        let mut r = rng(seed);
        let f = random_poly(n, 3, &mut r);
        let g = random_poly(n, 3, &mut r);
        let dist = ProductDistribution::iid(Law::Gaussian, n);
        let tf = expected_derivative_tensor(&f, &dist, d).unwrap();
        prop_assert!(tf.is_symmetric(0.0));
        let (alpha, beta) = (r.random_range(-2.0..2.0), r.random_range(-2.0..2.0));
        let combo = f.scaled(alpha).add(&g.scaled(beta)).unwrap();
        let lhs = expected_derivative_tensor(&combo, &dist, d).unwrap();
        let rhs = tf.axpby(alpha, &expected_derivative_tensor(&g, &dist, d).unwrap(), beta).unwrap();
        for (x, y) in lhs.values().iter().zip(rhs.values()) {
            prop_assert!((x - y).abs() <= 1e-12 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn top_derivative_of_a_chaos_is_its_kernel(seed in any::<u64>(), d in 1usize..=3) {
        let mut r = rng(seed);
        let a = apply_mask(&tensor(d, 3, &mut r).symmetrize(), &IndexMask::OffDiagonal).unwrap();
        let f = Polynomial::from_tensor(&a).unwrap();
        let fact: f64 = (1..=d).map(|k| k as f64).product();
        for law in [Law::Gaussian, Law::Rademacher] {
            let dist = ProductDistribution::iid(law, 3);
            let t = expected_derivative_tensor(&f, &dist, d).unwrap();
            for (x, y) in t.values().iter().zip(a.values()) {
                prop_assert!((x - fact * y).abs() <= 1e-12 * (1.0 + x.abs()));
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = random_poly(2, 3, &mut r);
        let x: Vec<f64> = (0..2).map(|_| r.random_range(-1.0..1.0)).collect();
        let h = 1e-4;
        let grad = f.gradient(&x).unwrap();
        for v in 0..2 {
            let mut up = x.clone();
            let mut down = x.clone();
            up[v] += h;
            down[v] -= h;
            let fd = (f.evaluate(&up).unwrap() - f.evaluate(&down).unwrap()) / (2.0 * h);
            let scale = 1.0 + f.terms().map(|(_, c)| c.abs()).sum::<f64>();
            prop_assert!((fd - grad[v]).abs() <= 1e-6 * scale);
        }
    }

    #[test]
    fn moment_bounds_increase_with_p(seed in any::<u64>(), p in 2.0f64..8.0, dp in 0.0f64..4.0) {
        let mut r = rng(seed);
        let f = random_poly(2, 3, &mut r);
        let dist = ProductDistribution::iid(Law::Gaussian, 2);
        let opts = NormOptions::default();
        let lo = gaussian_moment_bound(&f, &dist, p, &opts).unwrap().total;
        let hi = gaussian_moment_bound(&f, &dist, p + dp, &opts).unwrap().total;
        prop_assert!(lo <= hi * (1.0 + 1e-12));
    }

    #[test]
    fn moment_bounds_ignore_variable_labels(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = random_poly(3, 3, &mut r);
        let relabeled = Polynomial::from_terms(
            3,
            f.terms().map(|(m, c)| {
                let mut m: Vec<(usize, u32)> = m.iter().map(|&(v, e)| ((v + 1) % 3, e)).collect();
                m.sort_unstable();
                (m, c)
            }),
        )
        .unwrap();
        let dist = ProductDistribution::iid(Law::Gaussian, 3);
        let opts = NormOptions::default();
        let a = gaussian_moment_bound(&f, &dist, 3.0, &opts).unwrap().total;
        let b = gaussian_moment_bound(&relabeled, &dist, 3.0, &opts).unwrap().total;
        prop_assert!((a - b).abs() <= 1e-8 * a.max(1.0));
    }

    #[test]
    fn eta_is_monotone(seed in any::<u64>(), t in 0.1f64..10.0, dt in 0.0f64..5.0, l in 0.5f64..2.0, dl in 0.0f64..2.0) {
        let mut r = rng(seed);
        let f = random_poly(2, 2, &mut r);
        let dist = ProductDistribution::iid(Law::Gaussian, 2);
        let opts = NormOptions::default();
        let eta = |t: f64, l: f64| eta_tail(&f, &dist, t, l, 1.0, &opts).unwrap().total;
        prop_assert!(eta(t, l) <= eta(t + dt, l) * (1.0 + 1e-12));
        prop_assert!(eta(t, l + dl) <= eta(t, l) * (1.0 + 1e-12));
    }

    #[test]
    fn empirical_moments_increase_with_p(seed in any::<u64>(), p in 1.0f64..6.0, dp in 0.0f64..3.0) {
        let mut r = rng(seed);
        let xs: Vec<f64> = (0..200).map(|_| r.sample(StandardNormal)).collect();
        let lo = MomentEstimate::from_samples(&xs, p, true).value;
        let hi = MomentEstimate::from_samples(&xs, p + dp, true).value;
        prop_assert!(lo <= hi * (1.0 + 1e-12));
    }

    #[test]
    fn sampling_is_deterministic(seed in any::<u64>(), n in 1usize..500) {
        let draw = |r: &mut ChaCha8Rng| -> concentro::Result<f64> { Ok(r.sample(StandardNormal)) };
        let a = chunked_samples(n, 64, seed, draw).unwrap();
        let b = chunked_samples(n, 64, seed, draw).unwrap();
        prop_assert_eq!(a.len(), n);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn counting_polynomials_agree_with_traces(seed in any::<u64>(), n in 3usize..=9, p in 0.05f64..0.95) {
        let k3 = GraphSpec::clique(3).unwrap();
        let f = counting_polynomial(&k3, n).unwrap();
        let ones = vec![1.0; n * (n - 1) / 2];
        prop_assert_eq!(f.evaluate(&ones).unwrap(), (n * (n - 1) * (n - 2)) as f64);
        let g = sample_graph(n, p, &mut rng(seed));
        prop_assert_eq!(f.evaluate(&g.indicators()).unwrap() / 6.0, triangle_count_trace(&g) as f64);
    }

    #[test]
    fn edge_index_round_trips(n in 2usize..40) {
        let idx = EdgeIndex::new(n);
        for pos in 0..idx.len() {
            let (u, v) = idx.pair(pos);
            prop_assert!(u < v);
            prop_assert_eq!(idx.pos(u, v), pos);
        }
    }

    #[test]
    fn odd_polynomials_integrate_to_zero(coefs in prop::collection::vec(-5.0f64..5.0, 1..6)) {
        let g = Polynomial::from_terms(1, coefs.iter().enumerate().map(|(i, &c)| (vec![(0, 2 * i as u32 + 1)], c))).unwrap();
        prop_assert_eq!(semicircle_integral(&g).unwrap(), 0.0);
    }

    #[test]
    fn linear_statistic_tails_decay(t in 0.1f64..5.0, dt in 0.0f64..5.0, n in 1usize..500, dn in 0usize..500) {
        let cube = Polynomial::from_terms(1, [(vec![(0, 3)], 1.0)]).unwrap();
        let tail = |n: usize, t: f64| linstat_tail_bound(&cube, n, t, 1.0, 4.0).unwrap().tail;
        prop_assert!(tail(n, t + dt) <= tail(n, t));
        prop_assert!(tail(n + dn, t) <= tail(n, t));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn spectra_move_less_than_matrices(seed in any::<u64>(), n in 2usize..20) {
        prop_assert_eq!(hoffman_wielandt_check(n, 20, seed).unwrap().violations, 0);
    }
}
