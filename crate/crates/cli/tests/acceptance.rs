//! End-to-end acceptance checks. Each test prints one `PASS` or `FAIL` line
//! and then asserts it.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use hijack_core::analysis::{report_from_routes, route_pairs, PairSample, TargetSet};
use hijack_core::attack::{
    delay_sweep, find_next_naive, find_next_optimized, fuzz_robustness, greedy_attack,
    AttackConfig, AttackState, DistanceOracle,
};
use hijack_core::fixtures::{
    eclair_top3_toy, random_network, two_cluster_attack_links, two_cluster_bridge,
    two_cluster_bridge_pairs,
};
use hijack_core::routing::PolicyKind;
use hijack_core::{
    channel_fee, clique_game_matrices, clique_game_solve, eclair_hijack_metrics,
    generate_synthetic, verify_equilibrium, AttackLink, ChannelGraph, ChannelPolicy, GameParams,
    NodeIndex, RoutingPolicy, SyntheticSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BIN: &str = env!("CARGO_BIN_EXE_hijack");

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Prints the verdict outside the test harness's capture, then asserts it.
fn verdict(n: u32, name: &str, ok: bool, detail: String) {
    let line = format!(
        "criterion {n:>2} {}: {name}: {detail}\n",
        if ok { "PASS" } else { "FAIL" }
    );
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
    assert!(ok, "{}", line.trim_end());
}

fn lnd_without_penalty() -> RoutingPolicy {
    let mut p = RoutingPolicy::lnd();
    if let PolicyKind::Lnd(l) = &mut p.kind {
        l.probability_penalty = false;
    }
    p
}

fn deterministic_policies() -> Vec<RoutingPolicy> {
    vec![
        lnd_without_penalty(),
        RoutingPolicy::lnd(),
        RoutingPolicy::clightning().deterministic_core(),
        RoutingPolicy::eclair().deterministic_core(),
    ]
}

fn attacker_links(
    g: &ChannelGraph,
    cfg: &AttackConfig,
    policy: &RoutingPolicy,
    amount: u64,
    peers: &[NodeIndex],
) -> Vec<AttackLink> {
    let capacity = cfg.capacity_for(amount, &policy.limits);
    peers
        .iter()
        .map(|&p| AttackLink {
            peer: g.node_id(p).clone(),
            policy: cfg.link_policy,
            capacity,
        })
        .collect()
}

/// Pairs routable before the attack whose route crosses the attacker after
/// it, found by routing every pair from scratch.
fn brute_hijacked(
    g: &ChannelGraph,
    policy: &RoutingPolicy,
    pairs: &PairSample,
    peers: &[NodeIndex],
) -> usize {
    let cfg = AttackConfig::default();
    let attacked = g
        .add_attacker(
            &cfg.attacker,
            &attacker_links(g, &cfg, policy, pairs.amount(), peers),
        )
        .unwrap();
    let after = route_pairs(&attacked, policy, pairs, &mut rng(0)).unwrap();
    let before = route_pairs(g, policy, pairs, &mut rng(0)).unwrap();
    let attacker = TargetSet::nodes([g.node_count()]);
    after
        .iter()
        .zip(&before)
        .filter(|(a, b)| b.is_some() && a.as_ref().is_some_and(|r| attacker.hits(r)))
        .count()
}

#[test]
fn criterion_01_fee_arithmetic() {
    let p = ChannelPolicy::new(100, 1, 144);
    let fees = (channel_fee(&p, 1_000_000), channel_fee(&p, 2_000_000));
    verdict(
        1,
        "fee arithmetic",
        fees == (101, 102),
        format!("fees {fees:?}, expected (101, 102)"),
    );
}

#[test]
fn criterion_02_two_cluster_hijack() {
    let start = Instant::now();
    let g = two_cluster_bridge(4);
    let pairs = PairSample::from_pairs(two_cluster_bridge_pairs(&g), 100_000).unwrap();
    let attacked = g
        .add_attacker(&"attacker".into(), &two_cluster_attack_links())
        .unwrap();
    let attacker = TargetSet::nodes([g.node_count()]);
    let policies = [
        RoutingPolicy::lnd(),
        RoutingPolicy::clightning().deterministic_core(),
        RoutingPolicy::eclair().deterministic_core(),
        RoutingPolicy::suggested(1e-12).deterministic_core(),
    ];
    let mut fractions = Vec::new();
    for policy in &policies {
        let routes = route_pairs(&attacked, policy, &pairs, &mut rng(0)).unwrap();
        let rep = report_from_routes(&routes, &attacker);
        fractions.push((policy.name(), rep.fraction_hijacked, rep.unroutable_count));
    }
    let elapsed = start.elapsed();
    let ok =
        fractions.iter().all(|&(_, f, u)| f == 1.0 && u == 0) && elapsed < Duration::from_secs(1);
    verdict(
        2,
        "two-cluster hijack",
        ok,
        format!(
            "{} cross pairs, (policy, fraction, unroutable) {fractions:?}, {elapsed:.2?}",
            pairs.len()
        ),
    );
}

#[test]
fn criterion_03_submodularity() {
    let start = Instant::now();
    let mut r = rng(301);
    let mut violations = 0;
    let mut checks = 0;
    for instance in 0..500 {
        let n = r.random_range(3..=12);
        let extra = r.random_range(0..12);
        let g = random_network(&mut r, n, extra);
        let channels = instance % 2 == 1;
        let universe = if channels { g.channel_count() } else { n };
        let draw = |r: &mut ChaCha8Rng| -> BTreeSet<usize> {
            (0..universe).filter(|_| r.random_bool(0.4)).collect()
        };
        let (a, b) = (draw(&mut r), draw(&mut r));
        let union: BTreeSet<usize> = a.union(&b).copied().collect();
        let inter: BTreeSet<usize> = a.intersection(&b).copied().collect();
        let make = |s: &BTreeSet<usize>| {
            if channels {
                TargetSet::Channels(s.clone())
            } else {
                TargetSet::Nodes(s.clone())
            }
        };
        let pairs = PairSample::all(n, 20_000);
        for policy in deterministic_policies() {
            let routes = route_pairs(&g, &policy, &pairs, &mut rng(0)).unwrap();
            let c = |s: &BTreeSet<usize>| report_from_routes(&routes, &make(s)).hijacked_count;
            checks += 1;
            if c(&a) + c(&b) < c(&union) + c(&inter) {
                violations += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    let ok = violations == 0 && elapsed < Duration::from_secs(60);
    verdict(
        3,
        "submodularity",
        ok,
        format!("{violations} violations in {checks} checks over 500 instances, {elapsed:.2?}"),
    );
}

#[test]
fn criterion_04_greedy_approximation() {
    let start = Instant::now();
    let mut r = rng(401);
    let policies = deterministic_policies();
    let mut violations = Vec::new();
    let mut worst = f64::INFINITY;
    for case in 0..100 {
        let extra = r.random_range(2..14);
        let g = random_network(&mut r, 12, extra);
        let policy = &policies[case % policies.len()];
        let pairs = PairSample::all(12, 100_000);
        let plan =
            greedy_attack(&g, policy, 2, &pairs, &AttackConfig::default(), &mut rng(0)).unwrap();
        let greedy = plan.steps.last().map_or(0, |s| s.hijacked);
        let mut opt = 0;
        for a in 0..12 {
            for b in a + 1..12 {
                opt = opt.max(brute_hijacked(&g, policy, &pairs, &[a, b]));
            }
        }
        if opt > 0 {
            worst = worst.min(greedy as f64 / opt as f64);
        }
        if 4 * greedy < 3 * opt {
            violations.push((case, greedy, opt));
        }
    }
    let elapsed = start.elapsed();
    let ok = violations.is_empty() && elapsed < Duration::from_secs(300);
    verdict(
        4,
        "greedy approximation",
        ok,
        format!("violations {violations:?}, worst greedy/opt {worst:.3}, {elapsed:.2?}"),
    );
}

#[test]
fn criterion_05_find_next_equivalence() {
    let start = Instant::now();
    let mut r = rng(501);
    let mut policies = deterministic_policies();
    policies.push(RoutingPolicy::suggested(1e-12).deterministic_core());
    let mut mismatches = Vec::new();
    let mut selections = 0;
    for case in 0..100 {
        let extra = r.random_range(2..20);
        let g = random_network(&mut r, 15, extra);
        let policy = &policies[case % policies.len()];
        let pairs = PairSample::all(15, [1000, 100_000][case % 2]);
        let cfg = AttackConfig::default();
        let o = DistanceOracle::build(
            &g,
            policy,
            &pairs,
            &cfg.template(pairs.amount(), &policy.limits),
        )
        .unwrap();
        let mut st = AttackState::new(&o);
        for _ in 0..3 {
            let universe: Vec<usize> = (0..pairs.len())
                .filter(|&i| !st.is_hijacked(i) && st.best_weight(i).is_finite())
                .collect();
            let naive = find_next_naive(&st, &universe);
            let fast = find_next_optimized(&st);
            selections += 1;
            if naive != fast {
                mismatches.push((case, naive, fast));
            }
            match fast {
                Some(next) => st.commit(next.peer).unwrap(),
                None => break,
            }
        }
    }
    let elapsed = start.elapsed();
    let ok = mismatches.is_empty() && elapsed < Duration::from_secs(60);
    verdict(
        5,
        "find_next equivalence",
        ok,
        format!(
            "{} mismatches in {selections} selections, {elapsed:.2?}",
            mismatches.len()
        ),
    );
}

#[test]
fn criterion_06_eclair_metrics() {
    let mut r = rng(601);
    let policy = RoutingPolicy::eclair();
    let mut broken = 0;
    for _ in 0..200 {
        let n = r.random_range(4..=9);
        let extra = r.random_range(2..10);
        let g = random_network(&mut r, n, extra);
        let set: BTreeSet<usize> = (0..n).filter(|_| r.random_bool(0.3)).collect();
        if set.is_empty() {
            continue;
        }
        let m = eclair_hijack_metrics(
            &g,
            &policy,
            &TargetSet::Nodes(set),
            &PairSample::all(n, 20_000),
        )
        .unwrap();
        if m.all_top3_fraction > m.best_route_fraction || m.all_top3_fraction > m.expected_fraction
        {
            broken += 1;
        }
    }
    let g = eclair_top3_toy();
    let id = |s: &str| g.node_index(&s.into()).unwrap();
    let pairs =
        PairSample::from_pairs(vec![(id("s"), id("t")), (id("t"), id("s"))], 10_000).unwrap();
    let toy = eclair_hijack_metrics(&g, &policy, &TargetSet::nodes([id("x")]), &pairs).unwrap();
    let toy_ok = toy.best_route_fraction == 0.5
        && toy.all_top3_fraction == 0.0
        && toy.expected_fraction == 2.0 / 3.0;
    verdict(
        6,
        "eclair metric ordering",
        broken == 0 && toy_ok,
        format!(
            "{broken} ordering violations in 200 instances; toy (best, all3, expected) = ({}, {}, {})",
            toy.best_route_fraction, toy.all_top3_fraction, toy.expected_fraction
        ),
    );
}

#[test]
fn criterion_07_fuzz_robustness() {
    let start = Instant::now();
    let g = generate_synthetic(&SyntheticSpec::new(50, 2, 701)).unwrap();
    let pairs = PairSample::all(50, 1000);
    let mut core = RoutingPolicy::clightning();
    if let PolicyKind::CLightning(c) = &mut core.kind {
        c.fuzz = 0.0;
    }
    let plan = greedy_attack(&g, &core, 30, &pairs, &AttackConfig::default(), &mut rng(0)).unwrap();
    let pts = fuzz_robustness(&g, &plan, &[0.0, 0.05], 20, &pairs, &mut rng(702)).unwrap();
    let diff = (pts[1].mean_fraction - pts[0].mean_fraction).abs();
    let elapsed = start.elapsed();
    let ok = diff <= 0.05 && elapsed < Duration::from_secs(120);
    verdict(
        7,
        "fuzz robustness",
        ok,
        format!(
            "fuzz 0 mean {:.4}, fuzz 0.05 mean {:.4} (sd {:.4}), |diff| {diff:.4}, {elapsed:.2?}",
            pts[0].mean_fraction, pts[1].mean_fraction, pts[1].stddev
        ),
    );
}

fn delay_curve(
    g: &ChannelGraph,
    policy: &RoutingPolicy,
    pairs: &PairSample,
    delays: &[u32],
) -> Vec<f64> {
    let plan = greedy_attack(g, policy, 30, pairs, &AttackConfig::default(), &mut rng(0)).unwrap();
    delay_sweep(g, policy, &plan, delays, pairs)
        .unwrap()
        .iter()
        .map(|p| p.fraction)
        .collect()
}

/// Asserted under C-lightning at 1 000 000 msat, where hop weights follow
/// delay; lnd's curve is reported alongside.
#[test]
fn criterion_08_delay_sweep_shape() {
    let start = Instant::now();
    let mut spec = SyntheticSpec::new(100, 2, 801);
    spec.sampler.default_delay_fraction = 1.0;
    let g = generate_synthetic(&spec).unwrap();
    let pairs = PairSample::all(100, 1_000_000);
    let delays = [9, 40, 80, 144, 200, 400];
    let f = delay_curve(
        &g,
        &RoutingPolicy::clightning().deterministic_core(),
        &pairs,
        &delays,
    );
    let lnd = delay_curve(&g, &RoutingPolicy::lnd(), &pairs, &delays);
    let drops: Vec<f64> = f.windows(2).map(|w| w[0] - w[1]).collect();
    let monotone = drops.iter().all(|&d| d >= 0.0);
    // The step from 144 to 200, where the attacker's delay first exceeds the
    // network's.
    let crossing = delays.iter().position(|&d| d == 144).unwrap();
    let largest = drops
        .iter()
        .enumerate()
        .all(|(i, &d)| i == crossing || d < drops[crossing]);
    let elapsed = start.elapsed();
    let show = |v: &[f64]| {
        v.iter()
            .map(|x| format!("{x:.4}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    verdict(
        8,
        "delay sweep shape",
        monotone && largest && elapsed < Duration::from_secs(120),
        format!(
            "delays {delays:?}: clightning [{}], lnd [{}], {elapsed:.2?}",
            show(&f),
            show(&lnd)
        ),
    );
}

#[test]
fn criterion_09_clique_game() {
    let start = Instant::now();
    let mut tuples = 0;
    let mut not_equilibrium = 0;
    let mut value_mismatch = 0;
    let mut example = None;
    for v in 3..=20u32 {
        for k in 1..=v - 2 {
            for h in [0.5, 2.0, 10.0, 100.0] {
                for i in [0.0, 0.1, 1.0] {
                    let p = GameParams { h, i, v, k };
                    let m = clique_game_matrices(&p).unwrap();
                    let s = clique_game_solve(&p).unwrap();
                    tuples += 1;
                    if !verify_equilibrium(&m, &s.profile, 1e-9) {
                        not_equilibrium += 1;
                        example.get_or_insert(p);
                    }
                    let want = k as f64 * (h / (v as f64 - 1.0) - i);
                    if (s.attacker_value - want).abs() > 1e-12 * want.abs().max(f64::MIN_POSITIVE) {
                        value_mismatch += 1;
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let ok = tuples >= 1000
        && not_equilibrium == 0
        && value_mismatch == 0
        && elapsed < Duration::from_secs(10);
    verdict(
        9,
        "clique game",
        ok,
        format!(
            "{tuples} tuples: {not_equilibrium} fail verify_equilibrium (first {example:?}), {value_mismatch} value mismatches, {elapsed:.2?}"
        ),
    );
}

fn run(args: &[&str]) {
    let out = Command::new(BIN).args(args).output().unwrap();
    assert!(
        out.status.success(),
        "hijack {args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn read_csv(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path)
        .unwrap()
        .records()
        .map(|r| r.unwrap())
        .collect()
}

fn column(rows: &[csv::StringRecord], i: usize) -> Vec<f64> {
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

fn nondecreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] >= w[0])
}

/// Runs on `HIJACK_SNAPSHOT` when set, else on a 4000-node synthetic graph.
#[test]
fn criterion_10_large_graph_curves() {
    let dir = tempfile::tempdir().unwrap();
    let snapshot = std::env::var("HIJACK_SNAPSHOT").ok();
    let start = Instant::now();
    let mut problems = Vec::new();
    let mut summary = Vec::new();
    for seed in 1..=5u64 {
        let seed_s = seed.to_string();
        let graph: Vec<&str> = match &snapshot {
            Some(path) => vec!["--graph", path],
            None => vec!["--synthetic", "n=4000,m=4"],
        };
        let cen = dir.path().join(format!("centrality-{seed}.csv"));
        let att = dir.path().join(format!("attack-{seed}.csv"));
        for (sub, out) in [("centrality", &cen), ("attack", &att)] {
            let mut args = vec![sub];
            args.extend(&graph);
            args.extend([
                "--pairs",
                "sample:10000",
                "--amount",
                "1000",
                "--k",
                "10",
                "--seed",
                &seed_s,
            ]);
            args.extend(["--out", out.to_str().unwrap()]);
            run(&args);
        }
        let cen_rows = read_csv(&cen);
        let curve = column(&cen_rows, 3);
        if curve.len() != 10 || !nondecreasing(&curve) {
            problems.push(format!("seed {seed}: centrality curve {curve:?}"));
        }
        let att_rows = read_csv(&att);
        let greedy = column(&att_rows, 7);
        let baseline = column(&att_rows, 9);
        if greedy.len() != 10 || !nondecreasing(&greedy) || !nondecreasing(&baseline) {
            problems.push(format!(
                "seed {seed}: attack curves {greedy:?} / {baseline:?}"
            ));
        }
        let losing: Vec<usize> = (0..greedy.len())
            .filter(|&i| greedy[i] <= baseline[i])
            .map(|i| i + 1)
            .collect();
        if !losing.is_empty() {
            problems.push(format!(
                "seed {seed}: greedy not above baseline at k {losing:?}"
            ));
        }
        summary.push(format!(
            "seed {seed}: top-10 {:.3}, greedy@10 {:.3}, baseline@10 {:.3}",
            curve.last().unwrap_or(&f64::NAN),
            greedy.last().unwrap_or(&f64::NAN),
            baseline.last().unwrap_or(&f64::NAN)
        ));
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(1800) {
        problems.push(format!("took {elapsed:.0?}"));
    }
    verdict(
        10,
        "large-graph curves",
        problems.is_empty(),
        format!(
            "{}; problems {problems:?}; {elapsed:.0?}",
            summary.join("; ")
        ),
    );
}

#[test]
fn criterion_11_determinism() {
    let graph = [
        "--synthetic",
        "n=50,m=2",
        "--pairs",
        "sample:300",
        "--seed",
        "11",
    ];
    let runs: Vec<(&str, Vec<&str>)> = vec![
        ("stats", vec!["--synthetic", "n=50,m=2", "--seed", "11"]),
        ("routes", [&graph[..], &["--policy", "clightning"]].concat()),
        (
            "centrality",
            [&graph[..], &["--policy", "eclair", "--k", "4"]].concat(),
        ),
        (
            "attack",
            [
                &graph[..],
                &["--policy", "clightning", "--k", "4", "--trials", "3"],
            ]
            .concat(),
        ),
        (
            "fuzz",
            [&graph[..], &["--k", "4", "--trials", "3"]].concat(),
        ),
        ("delay", [&graph[..], &["--k", "4"]].concat()),
        (
            "suggested",
            [
                &graph[..],
                &[
                    "--interest-ratio",
                    "1e-12",
                    "--k",
                    "3",
                    "--centrality-k",
                    "3",
                    "--trials",
                    "2",
                ],
            ]
            .concat(),
        ),
        (
            "game",
            vec!["--H", "10", "--I", "0.5", "--V", "12", "--k", "3"],
        ),
    ];
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut differing = Vec::new();
    for (sub, args) in &runs {
        let mut outputs = Vec::new();
        for dir in &dirs {
            let out = dir.path().join(format!("{sub}.csv"));
            let mut full = vec![*sub];
            full.extend(args.iter().copied());
            full.extend(["--out", out.to_str().unwrap()]);
            run(&full);
            let sidecar = dir.path().join(format!("{sub}.csv.json"));
            outputs.push((
                std::fs::read(&out).unwrap(),
                std::fs::read(sidecar).unwrap(),
            ));
        }
        if outputs[0] != outputs[1] {
            differing.push(*sub);
        }
    }
    verdict(
        11,
        "determinism",
        differing.is_empty(),
        format!(
            "{} subcommands run twice, differing: {differing:?}",
            runs.len()
        ),
    );
}
