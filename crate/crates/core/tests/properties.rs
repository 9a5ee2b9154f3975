use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;

use graphwave::averaging::apply_averaging;
use graphwave::continuous::spectrum_report;
use graphwave::discrete::{apply_transition, discrete_spectrum, VertexFunction};
use graphwave::edge_function::SampledEdgeFunction;
use graphwave::random::{random_network, random_sampled, rng};
use graphwave::wave::extend;
use graphwave::Network;

fn vertex_noise<'a>(net: &'a Network, seed: u64) -> VertexFunction<'a> {
    let mut r = rng(seed);
    let values = (0..net.num_vertices())
        .map(|_| Complex64::new(r.sample(StandardNormal), r.sample(StandardNormal)))
        .collect();
    VertexFunction::new(net, values).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn network_json_round_trips(seed in any::<u64>()) {
        let net = random_network(&mut rng(seed), 8);
        prop_assert_eq!(Network::parse(&net.to_json()).unwrap(), net);
    }

    #[test]
    fn measures_ignore_edge_order(seed in any::<u64>()) {
        let net = random_network(&mut rng(seed), 8);
        let mut edges: Vec<(String, String, f64)> = net
            .edges()
            .iter()
            .map(|e| (net.vertex_id(e.v).to_string(), net.vertex_id(e.u).to_string(), e.c))
            .collect();
        edges.reverse();
        let permuted = Network::new(net.vertices(), &edges).unwrap();
        for (a, b) in net.measures().iter().zip(permuted.measures()) {
            prop_assert!((a - b).abs() <= 1e-14 * a);
        }
        let s = net.structure_report();
        prop_assert_eq!(s.cycle_rank + net.num_vertices(), net.num_edges() + 1);
        prop_assert_eq!(s.is_tree, s.cycle_rank == 0);
        if let Some(c) = s.coloring {
            prop_assert!(net.edges().iter().all(|e| c[e.u] != c[e.v]));
        }
    }

    #[test]
    fn transition_is_self_adjoint_and_diagonalized(seed in any::<u64>()) {
        let net = random_network(&mut rng(seed), 8);
        let f = vertex_noise(&net, seed ^ 1);
        let g = vertex_noise(&net, seed ^ 2);
        let lhs = apply_transition(&net, &f).inner_product(&g);
        let rhs = f.inner_product(&apply_transition(&net, &g));
        prop_assert!((lhs - rhs).norm() <= 1e-12 * f.norm() * g.norm());
        // expansion in the eigenbasis reconstructs f
        let spec = discrete_spectrum(&net).unwrap();
        let mut rebuilt = VertexFunction::constant(&net, Complex64::new(0.0, 0.0));
        for p in &spec {
            prop_assert!(p.value.abs() <= 1.0);
            rebuilt = rebuilt.combine(Complex64::new(1.0, 0.0), &p.vector, p.vector.inner_product(&f));
        }
        let err = rebuilt.combine(Complex64::new(1.0, 0.0), &f, Complex64::new(-1.0, 0.0)).norm();
        prop_assert!(err <= 1e-10 * f.norm());
    }

    #[test]
    fn edge_inner_product_is_hermitian(seed in any::<u64>()) {
        let net = random_network(&mut rng(seed), 8);
        let mut r = rng(seed ^ 3);
        let f = random_sampled(&net, 32, &mut r).unwrap();
        let g = random_sampled(&net, 32, &mut r).unwrap();
        let fg = f.inner_product(&g).unwrap();
        let gf = g.inner_product(&f).unwrap();
        prop_assert!((fg - gf.conj()).norm() <= 1e-12 * f.norm() * g.norm());
        prop_assert!(f.inner_product(&f).unwrap().im.abs() <= 1e-12 * f.norm().powi(2));
    }

    #[test]
    fn band_counts_match_discrete_spectrum(seed in any::<u64>()) {
        let net = random_network(&mut rng(seed), 8);
        let report = spectrum_report(&net, 3).unwrap();
        let interior = report.p_spectrum.iter().filter(|p| p.value.abs() < 1.0 - 1e-9).count();
        for band in &report.bands {
            let expected = interior + usize::from(band.n == 0);
            prop_assert_eq!(band.pairs.len(), expected);
        }
        prop_assert!(report.predicates.dimensions_match_structure);
        // a finite network always carries the constants in the kernel at 4 pi^2
        prop_assert!(report.predicates.zero_in_point_spectrum_of_a);
    }

    #[test]
    fn averaging_is_symmetric_and_contractive_on_smooth_data(seed in any::<u64>()) {
        let net = random_network(&mut rng(seed), 6);
        let report = spectrum_report(&net, 1).unwrap();
        let pairs = report.pairs();
        let mut r = rng(seed ^ 4);
        // random combinations of low eigenfunctions
        let mut combo = || {
            let noise = random_sampled(&net, 2, &mut r).unwrap();
            let coeffs = noise.values().concat();
            let mut acc = SampledEdgeFunction::zeros(&net, 256).unwrap();
            for (p, c) in pairs.iter().zip(coeffs.iter().cycle()) {
                acc = acc.combine(Complex64::new(1.0, 0.0), &p.eigenfunction.sample(256).unwrap(), *c).unwrap();
            }
            acc
        };
        let (f, g) = (combo(), combo());
        let (af, ag) = (apply_averaging(&net, &f), apply_averaging(&net, &g));
        let asym = (af.inner_product(&g).unwrap() - f.inner_product(&ag).unwrap()).norm();
        prop_assert!(asym <= 1e-3 * f.norm() * g.norm());
        prop_assert!(af.norm() <= f.norm() * (1.0 + 1e-3));
    }

    #[test]
    fn dalembert_is_even_and_shifts_are_bounded(seed in any::<u64>(), k in 0i64..=32) {
        let net = random_network(&mut rng(seed), 8);
        let f = random_sampled(&net, 16, &mut rng(seed ^ 5)).unwrap();
        let ext = extend(&net, &f, 3).unwrap();
        let (plus, minus) = (ext.dalembert_steps(k).unwrap(), ext.dalembert_steps(-k).unwrap());
        prop_assert_eq!(plus.values(), minus.values());
        for m in -2..=1 {
            let base = ext.shifted(m * 16).unwrap().norm().powi(2);
            let next = ext.shifted((m + 1) * 16).unwrap().norm().powi(2);
            prop_assert!(next <= 10.0 * base && base <= 10.0 * next);
        }
    }
}
