//! Library results checked against closed forms and independent computations.

use std::f64::consts::PI;

use mixnorm::counterexamples::{
    dilated_family, oscillatory_family, rate_fit, tensor_pair_family, FamilyGrid, RateModel, Ramp,
};
use mixnorm::differences::{
    besov_norm_diff, besov_terms, directional_difference, isotropic_besov_norm, mixed_difference, BesovParams,
    DirectionSet, MixedOrder,
};
use mixnorm::fourier::{build_system, lp_block, nikolskij_ratio, SystemKind};
use mixnorm::multipliers::{algebra_ratio, moser_ratio, Space};
use mixnorm::profile::{bump, smoothed_indicator};
use mixnorm::random::random_trig_family;
use mixnorm::sobolev::cmix_norm;
use mixnorm::{Extension, GridBox, GridFunction};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn periodic_1d(seed: u64, modes: usize, n: usize) -> GridFunction {
    let domain = GridBox::cube(1, 0.0, 1.0).unwrap();
    random_trig_family(&domain, &[modes], 1.0, seed, 1).unwrap()[0].sample(&[n]).unwrap()
}

#[test]
fn one_dimensional_mixed_norm_is_the_isotropic_norm() {
    for seed in 0..5 {
        let u = periodic_1d(seed, 6, 128);
        for (r, p, m) in [(0.5, 2.0, 1), (1.3, 3.0, 2), (0.8, f64::INFINITY, 1)] {
            assert_eq!(besov_norm_diff(&u, r, p, m).unwrap(), isotropic_besov_norm(&u, r, p, m).unwrap());
        }
    }
}

#[test]
fn tensor_norm_is_the_product_of_factor_terms() {
    for seed in 0..10u64 {
        let f = periodic_1d(seed, 5, 64);
        let g = periodic_1d(100 + seed, 3, 32);
        let params = BesovParams::new(1.2, 2.5, 2).unwrap();
        // (||f||_p + s_f)(||g||_p + s_g) with s the dyadic seminorm of each factor
        let factor = |u: &GridFunction| {
            let t = besov_terms(u, &params).unwrap();
            assert_eq!(t[0].1, u.lp_norm(2.5).unwrap());
            t[0].1 + t[1].1
        };
        let want = factor(&f) * factor(&g);
        let dense = f.tensor_product(&g).unwrap();
        let got = besov_norm_diff(&dense, 1.2, 2.5, 2).unwrap();
        assert!(rel(got, want) <= 1e-10, "seed {seed}: {got} vs {want}");
    }
}

#[test]
fn mixed_difference_of_tensor_is_tensor_of_differences() {
    let f = periodic_1d(3, 4, 32);
    let g = periodic_1d(4, 4, 16);
    let dense = f.tensor_product(&g).unwrap();
    let mixed = mixed_difference(&dense, DirectionSet::full(2), &MixedOrder::new(vec![2, 1]), &[3.0 / 32.0, 2.0 / 16.0])
        .unwrap();
    let df = directional_difference(&f, 0, 2, 3.0 / 32.0).unwrap().function;
    let dg = directional_difference(&g, 0, 1, 2.0 / 16.0).unwrap().function;
    let want = df.tensor_product(&dg).unwrap();
    for (a, b) in mixed.function.values().iter().zip(want.values()) {
        assert!((a - b).abs() <= 1e-14, "{a} vs {b}");
    }
}

#[test]
fn sharp_blocks_are_orthogonal() {
    let domain = GridBox::cube(2, 0.0, 2.0 * PI).unwrap();
    let u = random_trig_family(&domain, &[12, 12], 0.0, 9, 1).unwrap()[0].sample(&[64, 64]).unwrap();
    let sys = build_system(SystemKind::Sharp, u.domain(), u.shape()).unwrap();
    let blocks: Vec<GridFunction> = sys.multi_indices().iter().map(|k| lp_block(&u, k, &sys).unwrap()).collect();
    let dot = |a: &GridFunction, b: &GridFunction| -> f64 {
        a.values().iter().zip(b.values()).map(|(x, y)| x * y).sum::<f64>() * a.cell_volume()
    };
    let total = dot(&u, &u);
    let mut diagonal = 0.0;
    for (i, a) in blocks.iter().enumerate() {
        diagonal += dot(a, a);
        for b in &blocks[i + 1..] {
            assert!(dot(a, b).abs() <= 1e-12 * total);
        }
    }
    assert!(rel(diagonal, total) <= 1e-12);
}

#[test]
fn nikolskij_ratio_of_a_single_mode() {
    // u = cos(b x) over whole periods: ||u'||_p = b ||u||_p, so the ratio is 1
    let length = 64.0;
    for k in [1usize, 3, 10, 40] {
        let b = 2.0 * PI * k as f64 / length;
        let u = GridFunction::sample(
            |x| (b * x[0]).cos(),
            GridBox::cube(1, 0.0, length).unwrap(),
            vec![1024],
            Extension::Periodic,
        )
        .unwrap();
        for p in [2.0, 4.0, f64::INFINITY] {
            let ratio = nikolskij_ratio(&u, &[1], p, p, &[b]).unwrap();
            assert!((ratio - 1.0).abs() <= 1e-10, "k={k} p={p}: {ratio}");
        }
        // p0 = 2, p = inf: ||u'||_inf / (b^{3/2} ||u||_2) = b^{-1/2} sqrt(2/L)
        let ratio = nikolskij_ratio(&u, &[1], 2.0, f64::INFINITY, &[b]).unwrap();
        let want = (2.0 / length).sqrt() / b.sqrt();
        assert!(rel(ratio, want) <= 1e-10, "k={k}: {ratio} vs {want}");
    }
}

#[test]
fn cmix_products_obey_the_leibniz_constant() {
    // D^a(uv) = sum_b C(a,b) D^b u D^{a-b} v, so the constant is the largest
    // multinomial weight C(m, m/2)^d
    let domain = GridBox::cube(2, 0.0, 1.0).unwrap();
    let fs = random_trig_family(&domain, &[3, 3], 1.0, 21, 10).unwrap();
    for m in 1..=2u32 {
        let c = if m == 1 { 1.0 } else { 4.0 };
        for pair in fs.chunks(2) {
            let u = pair[0].sample(&[32, 32]).unwrap();
            let v = pair[1].sample(&[32, 32]).unwrap();
            let lhs = cmix_norm(&u.pointwise_multiply(&v).unwrap(), m).unwrap();
            let rhs = c * cmix_norm(&u, m).unwrap() * cmix_norm(&v, m).unwrap();
            assert!(lhs <= rhs * (1.0 + 1e-12), "m={m}: {lhs} > {rhs}");
        }
    }
}

fn bump_on(domain: &GridBox, n: usize, width: f64) -> GridFunction {
    GridFunction::sample(
        |x| x.iter().map(|&t| bump(t / width)).product(),
        domain.clone(),
        vec![n; domain.dim()],
        Extension::Zero,
    )
    .unwrap()
}

#[test]
fn plateau_multiplier_reduces_to_its_own_norm() {
    // f = 1 on the support of g, so fg = g and the ratio is 1/||f||
    let domain = GridBox::cube(2, -4.0, 4.0).unwrap();
    let g = bump_on(&domain, 128, 1.0);
    let f = GridFunction::sample(
        |x| x.iter().map(|&t| smoothed_indicator(t, 1.5, 3.0)).product(),
        domain,
        vec![128, 128],
        Extension::Zero,
    )
    .unwrap();
    assert_eq!(f.pointwise_multiply(&g).unwrap(), g);
    for space in [Space::Besov { r: 1.2, p: 2.0, m_diff: 2 }, Space::Sobolev { m: 1, p: 2.0 }] {
        let ratio = algebra_ratio(&f, &g, space).unwrap();
        let want = 1.0 / space.norm(&f).unwrap();
        assert!(rel(ratio, want) <= 1e-12, "{space:?}");
    }
}

#[test]
fn moser_ratio_of_a_fixed_bump_is_resolution_stable() {
    let domain = GridBox::cube(2, -2.0, 2.0).unwrap();
    let space = Space::Besov { r: 1.0, p: 2.0, m_diff: 2 };
    let ratio = |n: usize| {
        let f = bump_on(&domain, n, 1.0);
        moser_ratio(&f, &f, space).unwrap()
    };
    let (coarse, fine) = (ratio(128), ratio(256));
    assert!(coarse > 0.0 && rel(coarse, fine) <= 0.05, "{coarse} vs {fine}");
}

#[test]
fn oscillatory_derivative_grows_like_n_to_eps_minus_half() {
    let eps = 1.6;
    let fam = oscillatory_family(6, eps, Ramp::Linear, &FamilyGrid::oscillatory_default()).unwrap();
    let series: Vec<(f64, f64)> = fam
        .members
        .iter()
        .filter(|(n, _)| *n >= 2)
        .map(|(n, f)| {
            let dx = f.spacing(0);
            let d = directional_difference(f, 0, 1, dx).unwrap().function;
            (*n as f64, d.lp_norm(2.0).unwrap() / dx)
        })
        .collect();
    let fit = rate_fit(&series, RateModel::Power).unwrap();
    assert!((fit.slope - (eps - 0.5)).abs() <= 0.1 * (eps - 0.5), "slope {}", fit.slope);
}

#[test]
fn tensor_pairs_share_the_cross_norm() {
    let fam = dilated_family(3, &FamilyGrid::new(-4.0, 4.0, 512).unwrap()).unwrap();
    let pairs = tensor_pair_family(&fam, 2, 2.0).unwrap();
    let space = Space::Besov { r: 1.0, p: 2.0, m_diff: 2 };
    let g_norm = space.norm(&pairs.companion).unwrap();
    for ((n, big_f, big_g), (_, f)) in pairs.pairs.iter().zip(&fam.members) {
        let want = space.norm(f).unwrap() * g_norm;
        assert!(rel(big_f.space_norm(space).unwrap(), want) <= 1e-10, "n={n}");
        let product = big_f.product(big_g).unwrap();
        // f_n g = f_n on both axes
        for factor in product.factors() {
            assert_eq!(factor, f);
        }
        let dense = big_f.to_dense().unwrap();
        assert!(rel(space.norm(&dense).unwrap(), want) <= 1e-10, "dense n={n}");
    }
}
