use slide_core::bench::{bench_speedup, speedup};
use slide_core::io::{BenchSection, RunConfig};
use slide_core::nn::{Activation, Network, Precision};
use slide_core::pipeline::Generator;

fn small(preset: &str, extra: &str) -> RunConfig {
    RunConfig::from_toml_str(&format!("preset = \"{preset}\"\n{extra}")).unwrap()
}

#[test]
fn trajectories_depend_only_on_their_index() {
    let cfg = small("duffing", "[training]\nn_train = 12\nn_val = 4\n");
    let g = Generator::new(&cfg).unwrap();
    let (train, val) = g.train_val(None).unwrap();
    assert_eq!((train.len(), val.len()), (12, 4));
    assert_eq!(train.provenance.first_index, 0);
    assert_eq!(val.provenance.first_index, 12);
    assert_eq!(val.provenance.base_seed, Some(1));

    let again = g.windows(12..16, None).unwrap();
    assert_eq!(again.data, val.data);
    let single = g.windows(14..15, None).unwrap();
    assert_eq!(single.data.input(0), val.data.input(2));
    assert_eq!(single.data.target(0), val.data.target(2));

    let shifted = small("duffing", "[system]\nseed = 2\n[training]\nn_train = 12\nn_val = 4\n");
    let moved = Generator::new(&shifted).unwrap().windows(0..1, None).unwrap();
    assert_eq!(moved.data.input(0), train.data.input(1));
}

#[test]
fn duffing_inputs_are_normalized() {
    let cfg = small("duffing", "[training]\nn_train = 64\nn_val = 8\n");
    let (train, _) = Generator::new(&cfg).unwrap().train_val(None).unwrap();
    assert!(train.inputs_in_unit_range() >= 0.99);
    assert_eq!(train.data.n_in, 96);
    assert_eq!(train.data.n_out, 40);
}

#[test]
fn initial_conditions_come_from_the_configured_ranges() {
    let cfg = small("linear_oscillator", "[training]\nn_train = 40\nn_val = 4\n");
    let (train, _) = Generator::new(&cfg).unwrap().train_val(None).unwrap();
    let x0: Vec<f64> = (0..train.len()).map(|i| train.data.input(i)[0]).collect();
    let v0: Vec<f64> = (0..train.len()).map(|i| train.data.input(i)[1]).collect();
    assert!(x0.iter().chain(&v0).all(|v| (-1.0..1.0).contains(v)));
    assert!(x0.iter().any(|v| *v > 0.5) && x0.iter().any(|v| *v < -0.5));
    assert_ne!(x0, v0);
}

#[test]
fn slider_crank_startup_is_dropped() {
    let cfg = small("slider_crank_lumped", "[system]\nsteps = 8\nstartup_steps = 4\n[windows]\nn_in = 8\nn_out = 4\n");
    let g = Generator::new(&cfg).unwrap();
    let drive = g.drive(3, 8).unwrap();
    assert_eq!(drive.n_steps, 12);
    let traj = g.trajectory(3).unwrap();
    assert_eq!(traj.len(), 9);
    assert_eq!(traj.u[0], drive.sample(4));
    assert_eq!(traj.t[0], 0.0);
    let model = g.model();
    let start = g.initial_state(&drive).unwrap();
    assert!(model.constraint(&start.q, 0.0).iter().all(|c| c.abs() < 1e-10));
    assert!((start.q[0] - drive.sample(0)[0]).abs() < 1e-12);
}

#[test]
fn decay_estimate_for_duffing() {
    let cfg = small("duffing", "[linearization]\nn_trajectories = 2\nstride = 16\n");
    let d = Generator::new(&cfg).unwrap().decay().unwrap();
    assert!((d.mean_re + 4.0).abs() < 1e-6);
    assert!((d.t_d_mean - 1.151_292_546_497).abs() < 1e-6);
    assert!(cfg.slide_config().unwrap().truncation_time() >= d.t_d_mean);
}

#[test]
fn speedup_formula() {
    assert_eq!(speedup(1.0, 1e-3, 128, 32), 250.0);
    assert_eq!(speedup(0.5, 2e-3, 64, 64), 0.5 / 2e-3);
}

#[test]
fn bench_report_recomputes_its_speedup() {
    let cfg = small("duffing", "[bench]\nbatch_sizes = [1, 8]\n");
    let g = Generator::new(&cfg).unwrap();
    let sc = cfg.slide_config().unwrap();
    let net = Network::new(&[96, 16, 40], Activation::Relu, true, Precision::F32, 1).unwrap();
    let bench = BenchSection { repetitions: 20, warmup: 3, batch_sizes: vec![1, 8] };
    let r = bench_speedup(&net, &g, &sc, &bench).unwrap();
    assert_eq!(r.speedup, r.recomputed_speedup());
    assert_eq!(r.speedup.to_bits(), speedup(r.t_sim.median, r.t_nn.median, r.n_in, r.n_out).to_bits());
    assert_eq!((r.n_in, r.n_out), (96, 40));
    assert_eq!(r.sweep.len(), 2);
    assert_eq!(r.t_sim.repetitions, 20);
    for p in &r.sweep {
        assert_eq!(p.t_nn, p.t_batch.median / p.batch as f64);
        assert_eq!(p.speedup, speedup(r.t_sim.median, p.t_nn, 96, 40));
    }
    assert!(r.sweep_csv().lines().count() == 3);

    let wrong = Network::new(&[95, 40], Activation::Relu, true, Precision::F32, 1).unwrap();
    assert!(bench_speedup(&wrong, &g, &sc, &bench).is_err());
}
