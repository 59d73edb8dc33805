use qmseg_core::annealing::{solve_exact, solve_sa, SaConfig, Sampler, SimulatedAnnealingSampler};
use qmseg_core::evaluation::{dice, otsu_threshold};
use qmseg_core::graph_qubo::{
    build_graph, build_qubo, direct_loss, parse_qubo, parse_qubo_json, serialize_qubo,
    serialize_qubo_json,
};
use qmseg_core::imaging::{generate_phantom, load_pgm, resize_area, save_pgm, Lesion, PhantomSpec};
use qmseg_core::qfilter::{apply_filter, FilterConfig};
use qmseg_core::vqa::{solve_vqa, VqaConfig};
use qmseg_core::GrayImage;

fn phantom(w: usize, h: usize, noise: f64) -> (GrayImage, qmseg_core::BinaryMask) {
    generate_phantom(&PhantomSpec {
        width: w,
        height: h,
        lesions: vec![Lesion {
            cx: (w / 2) as f64,
            cy: (h / 2) as f64,
            radius: (w.min(h) / 4).max(1) as f64,
            intensity: 0.85,
        }],
        background: 0.15,
        noise,
        seed: 21,
    })
    .unwrap()
}

#[test]
fn exported_problem_round_trips_exactly() {
    let (img, _) = phantom(9, 7, 0.05);
    let z = apply_filter(&img, &FilterConfig::default()).unwrap();
    let q = build_qubo(&build_graph(&z, 0.5), 0.1);
    assert_eq!(parse_qubo(&serialize_qubo(&q)).unwrap(), q);
    assert_eq!(parse_qubo_json(&serialize_qubo_json(&q)).unwrap(), q);
}

#[test]
fn solvers_agree_on_a_small_phantom() {
    let (img, _) = phantom(20, 20, 0.05);
    let small = resize_area(&img, 5, 4).unwrap();
    let z = apply_filter(&small, &FilterConfig::default()).unwrap();
    let g = build_graph(&z, 0.5);
    let q = build_qubo(&g, 1.0);
    let exact = solve_exact(&q).unwrap();
    assert_eq!(exact.best_energy, 0.0);
    assert_eq!(exact.best, vec![0; 20]);

    let sampler = SimulatedAnnealingSampler(SaConfig {
        reads: 20,
        sweeps: 200,
        seed: 5,
        ..SaConfig::default()
    });
    let a = sampler.sample(&q).unwrap();
    let b = solve_sa(&q, &sampler.0).unwrap();
    assert!(a.same_result(&b));
    assert!(a.best_energy >= exact.best_energy);
    assert!((q.energy(&a.best).unwrap() - direct_loss(&g, 1.0, &a.best).unwrap()).abs() < 1e-9);
}

#[test]
fn phantom_survives_sixteen_bit_storage() {
    let (img, _) = phantom(16, 12, 0.1);
    let back = load_pgm(&save_pgm(&img, 65535).unwrap()).unwrap();
    for (a, b) in img.data().iter().zip(back.data()) {
        assert!((a - b).abs() <= 0.5 / 65535.0 + 1e-15);
    }
}

#[test]
fn variational_run_keeps_the_warm_start_at_zero_angles() {
    let (img, truth) = phantom(12, 12, 0.0);
    let z = apply_filter(&img, &FilterConfig::default()).unwrap();
    let g = build_graph(&z, 0.5);
    let cfg = VqaConfig {
        epochs: 5,
        ..VqaConfig::default()
    };
    let run = solve_vqa(&z, &g, 0.1, &cfg).unwrap();
    assert_eq!(run.mask, run.warm_start);
    assert_eq!(run.training.loss_history.len(), 6);
    // The filter darkens the lesion, so the seed covers the background.
    assert!(dice(&truth, &run.mask.invert()).unwrap() > 0.8);
}

#[test]
fn otsu_recovers_a_noiseless_disc() {
    let (img, truth) = phantom(30, 30, 0.0);
    let r = otsu_threshold(&img, 256).unwrap();
    assert_eq!(r.mask, truth);
}
