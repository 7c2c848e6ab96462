// SPDX-License-Identifier: Apache-2.0
//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use dgalab::algorithms::{dijkstra_reference, AlgoError, Algorithm};
use dgalab::experiment::{self, ExperimentConfig};
use dgalab::graph::{generate_kronecker, partition_1d, EdgeList, LocalGraph};
use dgalab::metrics::{write_csv, WorkStats};
use dgalab::runtime::{
    Channel, DistanceMessage, RankCtx, RankProgram, Runtime, RuntimeConfig, RuntimeError, EL_UNBOUNDED,
};
use dgalab::simnet::{delivery_delay, NetConfig};
use dgalab::{Distance, Rank, VertexId, INFINITY};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Conservation results of every algorithm run made by the suite.
static CONSERVATION: Mutex<(u64, Vec<String>)> = Mutex::new((0, Vec::new()));

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Outcome);

fn record_conservation(label: &str, cs: usize, stats: &WorkStats) {
    let mut c = CONSERVATION.lock().unwrap();
    c.0 += 1;
    if let Err(e) = stats.check_conservation(cs) {
        c.1.push(format!("{label}: {e}"));
    }
    if stats.useful + stats.useless != stats.processed() {
        c.1.push(format!("{label}: useful + useless != processed"));
    }
}

fn run(
    algorithm: Algorithm,
    graphs: &[LocalGraph],
    source: VertexId,
    cfg: &RuntimeConfig,
    label: &str,
) -> Result<(Vec<Distance>, WorkStats), String> {
    match algorithm.run(graphs, source, cfg) {
        Ok((d, s)) => {
            record_conservation(label, cfg.coalescing_size, &s);
            Ok((d, s))
        }
        Err(AlgoError::Metrics(e)) => {
            CONSERVATION.lock().unwrap().1.push(format!("{label}: {e}"));
            Err(format!("{label}: {e}"))
        }
        Err(e) => Err(format!("{label}: {e}")),
    }
}

fn oracle(algorithm: Algorithm, g: &EdgeList, source: VertexId) -> Vec<Distance> {
    match algorithm {
        Algorithm::DcBfs => dijkstra_reference(&g.with_unit_weights(), source),
        _ => dijkstra_reference(g, source),
    }
}

fn first_source(g: &EdgeList, rng: &mut ChaCha8Rng) -> VertexId {
    let deg = g.out_degrees();
    let candidates: Vec<VertexId> = (0..g.n).filter(|&v| deg[v as usize] > 0).collect();
    *candidates.choose(rng).expect("graph has edges")
}

fn random_runtime(rng: &mut ChaCha8Rng, num_ranks: usize) -> RuntimeConfig {
    RuntimeConfig {
        num_ranks,
        coalescing_size: *[1, 7, 64, 256, 4096].choose(rng).unwrap(),
        ee: *[1, 5, 22, 128, 512].choose(rng).unwrap(),
        el: *[0, 16, 64, EL_UNBOUNDED].choose(rng).unwrap(),
        flush_period: *[1, 1000, 20000].choose(rng).unwrap(),
        cache_capacity: *[0, 16, 1024].choose(rng).unwrap(),
        priority_messages: rng.gen(),
        delta: *[1, 8, 25, 100].choose(rng).unwrap(),
        seed: rng.gen(),
        ..Default::default()
    }
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let configs = 54;
    for i in 0..configs {
        let scale = rng.gen_range(6..=12);
        let ef = *[8, 16].choose(&mut rng).unwrap();
        let mw = *[1, 100].choose(&mut rng).unwrap();
        let p = *[1, 2, 4, 8].choose(&mut rng).unwrap();
        let g = generate_kronecker(scale, ef, mw, rng.gen()).unwrap().symmetrize();
        let graphs = partition_1d(&g, p).unwrap();
        let cfg = random_runtime(&mut rng, p);
        let source = first_source(&g, &mut rng);
        for a in Algorithm::ALL {
            let label = format!("config {i} (scale {scale}, ef {ef}, mw {mw}, p {p}) {a}");
            let (d, _) = run(a, &graphs, source, &cfg, &label)?;
            if d != oracle(a, &g, source) {
                return Err(format!("{label}: distances differ from oracle ({cfg:?})"));
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(300) {
        return Err(format!("took {elapsed:.1?}, limit 5 minutes"));
    }
    Ok(format!("{configs} configs x 3 algorithms match the oracle in {elapsed:.1?}"))
}

/// Sends a fixed list of messages and counts deliveries.
struct Burst {
    plan: Vec<Vec<(Rank, DistanceMessage)>>,
    delivered: Vec<u64>,
}

impl RankProgram for Burst {
    fn local_work(&self, rank: Rank) -> usize {
        self.plan[rank].len()
    }

    fn step(&mut self, rank: Rank, ctx: &mut RankCtx<'_>) -> Result<(), RuntimeError> {
        let (dst, msg) = self.plan[rank].pop().expect("step with work");
        ctx.send(msg, dst)
    }

    fn handle(&mut self, rank: Rank, _: DistanceMessage, _: Channel, _: &mut RankCtx<'_>) -> Result<(), RuntimeError> {
        self.delivered[rank] += 1;
        Ok(())
    }
}

fn burst_completion(cs: usize, net: NetConfig, count: u64) -> Result<u64, String> {
    let cfg = RuntimeConfig { num_ranks: 2, coalescing_size: cs, flush_period: 1 << 40, net, ..Default::default() };
    let mut rt = Runtime::new(cfg).map_err(|e| e.to_string())?;
    let plan = vec![(0..count).map(|v| (1, DistanceMessage::new(v, 1))).collect(), Vec::new()];
    let mut program = Burst { plan, delivered: vec![0; 2] };
    rt.run_epoch(&mut program).map_err(|e| e.to_string())?;
    let c = rt.total_counters();
    if program.delivered[1] != count || c.partial_buffers != 0 || c.full_buffers * cs as u64 != count {
        return Err(format!("cs={cs}: not every buffer filled ({c:?})"));
    }
    Ok(rt.now())
}

fn coalescing_cliff() -> Outcome {
    let start = Instant::now();
    let defaults = NetConfig::default();
    let (below, above) = (delivery_delay(43_000 * 12, &defaults), delivery_delay(44_000 * 12, &defaults));
    if below >= above {
        return Err(format!("delivery_delay(516000)={below} >= delivery_delay(528000)={above}"));
    }
    let net = NetConfig { eager_threshold_bytes: 1200, ..NetConfig::default() };
    if net.rendezvous_rtt == 0 {
        return Err("rendezvous_rtt must be positive".into());
    }
    let count = 100 * 101;
    let t100 = burst_completion(100, net.clone(), count)?;
    let t101 = burst_completion(101, net, count)?;
    if t101 <= t100 {
        return Err(format!("completion(101)={t101} <= completion(100)={t100}"));
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(60) {
        return Err(format!("took {elapsed:.1?}, limit 1 minute"));
    }
    Ok(format!("completion 100 -> {t100}, 101 -> {t101}; delay(516000)={below} < delay(528000)={above}"))
}

fn termination() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for i in 0..200 {
        let scale = rng.gen_range(3..=8);
        let p = rng.gen_range(1..=8usize).min(1 << scale);
        let g = generate_kronecker(scale, rng.gen_range(1..=16), rng.gen_range(1..=100), rng.gen()).unwrap();
        let g = if rng.gen() { g.symmetrize() } else { g };
        if g.is_empty() {
            continue;
        }
        let graphs = partition_1d(&g, p).unwrap();
        let mut cfg = random_runtime(&mut rng, p);
        cfg.coalescing_size = rng.gen_range(1..=64);
        cfg.horizon = 1_000_000_000_000;
        let a = *Algorithm::ALL.choose(&mut rng).unwrap();
        let source = rng.gen_range(0..g.n);
        let (_, s) = run(a, &graphs, source, &cfg, &format!("fuzz {i} {a}"))?;
        if s.messages_sent != s.messages_received {
            return Err(format!("fuzz {i}: sent {} != received {}", s.messages_sent, s.messages_received));
        }
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(120) {
        return Err(format!("took {elapsed:.1?}, limit 2 minutes"));
    }
    Ok(format!("200 fuzzed configs terminated in {elapsed:.1?}"))
}

fn cache_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut saved = 0;
    for i in 0..20 {
        let p = *[2, 4, 8].choose(&mut rng).unwrap();
        let g = generate_kronecker(rng.gen_range(7..=10), 16, 100, rng.gen()).unwrap().symmetrize();
        let graphs = partition_1d(&g, p).unwrap();
        let a = if i % 2 == 0 { Algorithm::DcSssp } else { Algorithm::DeltaStepping };
        let off = RuntimeConfig { num_ranks: p, cache_capacity: 0, delta: 25, ..Default::default() };
        let on = RuntimeConfig { cache_capacity: 4096, ..off.clone() };
        let source = first_source(&g, &mut rng);
        let (d_off, s_off) = run(a, &graphs, source, &off, &format!("pair {i} off"))?;
        let (d_on, s_on) = run(a, &graphs, source, &on, &format!("pair {i} on"))?;
        if d_on != d_off {
            return Err(format!("pair {i} {a}: distances differ with cache on"));
        }
        if s_on.messages_sent > s_off.messages_sent {
            return Err(format!(
                "pair {i} {a} p={p}: messages_sent on={} > off={}",
                s_on.messages_sent, s_off.messages_sent
            ));
        }
        saved += s_off.messages_sent - s_on.messages_sent;
    }
    Ok(format!("20 pairs identical, cache removed {saved} messages in total"))
}

fn delta_structure() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for i in 0..10 {
        let g = generate_kronecker(8, 8, 1, rng.gen()).unwrap().symmetrize();
        let p = *[1, 2, 4, 8].choose(&mut rng).unwrap();
        let graphs = partition_1d(&g, p).unwrap();
        let source = first_source(&g, &mut rng);
        let cfg = RuntimeConfig { num_ranks: p, delta: 1, ..Default::default() };
        let (d, s) = run(Algorithm::DeltaStepping, &graphs, source, &cfg, &format!("graph {i}"))?;
        let levels = dijkstra_reference(&g.with_unit_weights(), source);
        if d != levels {
            return Err(format!("graph {i}: distances differ from BFS levels"));
        }
        let ecc = levels.iter().copied().filter(|&l| l != INFINITY).max().unwrap();
        if s.buckets_processed != u64::from(ecc) + 1 {
            return Err(format!("graph {i}: {} buckets, eccentricity {ecc}", s.buckets_processed));
        }
    }
    Ok("bucket count equals eccentricity + 1 on 10 graphs".into())
}

fn determinism() -> Outcome {
    let mut cfg = ExperimentConfig::default();
    cfg.graph.scale = 8;
    cfg.sources = 2;
    cfg.set("sweep.algorithm", "dc-sssp,dc-bfs,delta-stepping").unwrap();
    cfg.set("sweep.rt.cache_capacity", "0,64").unwrap();
    cfg.set("sweep.num_ranks", "1,3").unwrap();
    let csv = |cfg: &ExperimentConfig| -> Result<Vec<u8>, String> {
        let rows = experiment::sweep(cfg).map_err(|e| e.to_string())?;
        let mut out = Vec::new();
        write_csv(&mut out, &rows).map_err(|e| e.to_string())?;
        Ok(out)
    };
    let (a, b) = (csv(&cfg)?, csv(&cfg)?);
    if a != b {
        return Err("CSV output differs between identical runs".into());
    }
    Ok(format!("{} identical bytes across two sweeps", a.len()))
}

fn scheduling_independence() -> Outcome {
    let g = generate_kronecker(10, 16, 100, 8).unwrap().symmetrize();
    let graphs = partition_1d(&g, 4).unwrap();
    let source = first_source(&g, &mut ChaCha8Rng::seed_from_u64(8));
    let mut reference: Option<Vec<Distance>> = None;
    let mut tuples = HashSet::new();
    for ee in [1, 22, 512] {
        for el in [0, 64] {
            for flush_period in [1, 1000] {
                let cfg = RuntimeConfig { num_ranks: 4, ee, el, flush_period, ..Default::default() };
                let label = format!("ee={ee} el={el} flush={flush_period}");
                let (d, s) = run(Algorithm::DcSssp, &graphs, source, &cfg, &label)?;
                match &reference {
                    None => reference = Some(d),
                    Some(r) if *r != d => return Err(format!("{label}: distances differ")),
                    Some(_) => {}
                }
                tuples.insert(s.work_tuple());
            }
        }
    }
    if tuples.len() < 2 {
        return Err("all 12 configs produced the same work tuple".into());
    }
    Ok(format!("12 configs, identical distances, {} distinct work tuples", tuples.len()))
}

fn conservation() -> Outcome {
    let c = CONSERVATION.lock().unwrap();
    if c.0 == 0 {
        return Err("no runs recorded".into());
    }
    match c.1.first() {
        Some(first) => Err(format!("{} of {} runs violate conservation; first: {first}", c.1.len(), c.0)),
        None => Ok(format!("{} runs conserve every counter, no impossible tasks", c.0)),
    }
}

fn guarded(f: fn() -> Outcome) -> Outcome {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    })
}

fn main() {
    let criteria: [Criterion; 7] = [
        (1, "oracle equivalence", oracle_equivalence),
        (3, "coalescing cliff", coalescing_cliff),
        (4, "termination", termination),
        (5, "cache soundness", cache_soundness),
        (6, "delta-stepping buckets", delta_structure),
        (7, "determinism", determinism),
        (8, "scheduling independence", scheduling_independence),
    ];
    let mut results: Vec<(u32, &str, Outcome)> = criteria.iter().map(|&(n, name, f)| (n, name, guarded(f))).collect();
    results.push((2, "counter conservation", guarded(conservation)));
    results.sort_by_key(|r| r.0);

    let mut failed = 0;
    for (n, name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("criterion {n} {name}: PASS ({detail})"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n} {name}: FAIL ({detail})");
            }
        }
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
