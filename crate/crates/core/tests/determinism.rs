use krivine::problem::benchmark;
use krivine::prover::{bench, prove, random_search, ConfigPatch, RunConfig};

fn small() -> ConfigPatch {
    ConfigPatch { episodes: Some(6), max_steps: Some(80), ..ConfigPatch::default() }
}

#[test]
fn proving_is_reproducible() {
    let p = benchmark("C2").unwrap();
    let config = RunConfig::default().resolve(&p.overrides, &small()).unwrap();
    let a = prove(&p, &config).unwrap();
    let b = prove(&p, &config).unwrap();
    assert_eq!(a.status, b.status);
    assert_eq!(a.certificate, b.certificate);
    assert_eq!(a.episodes, b.episodes);
    assert_eq!(a.rollout_trace, b.rollout_trace);
    assert_eq!(a.model, b.model);
}

#[test]
fn seeds_change_the_run() {
    let p = benchmark("C1").unwrap();
    let run = |seed| {
        let patch = ConfigPatch { seed: Some(seed), ..small() };
        let config = RunConfig::default().resolve(&p.overrides, &patch).unwrap();
        prove(&p, &config).unwrap().model
    };
    assert_ne!(run(1), run(2));
}

#[test]
fn random_search_is_order_insensitive() {
    let p = benchmark("C1").unwrap();
    let config = RunConfig::default().resolve(&p.overrides, &small()).unwrap();
    let a = random_search(&p, &config, 8).unwrap();
    let b = random_search(&p, &config, 8).unwrap();
    assert_eq!(a, b);
    assert!(a.trials.windows(2).all(|w| w[0].trial < w[1].trial));
}

#[test]
fn bench_reruns_agree() {
    let problems = vec![benchmark("C1").unwrap(), benchmark("C8").unwrap()];
    let strip = |mut r: krivine::prover::BenchReport| {
        r.rows.iter_mut().for_each(|row| row.wall_seconds = 0.0);
        r
    };
    let a = strip(bench(&problems, &RunConfig::default(), &small(), None));
    let b = strip(bench(&problems, &RunConfig::default(), &small(), None));
    assert_eq!(a, b);
    assert_eq!(a.rows.iter().map(|r| r.m0).collect::<Vec<_>>(), vec![14, 65]);
}
