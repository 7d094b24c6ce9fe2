//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any failed.

use std::collections::{BTreeMap, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use recsel::algo_features::conceptual::{load_conceptual_map, BUNDLED_MAP};
use recsel::algo_features::landmark::TimingMode;
use recsel::algo_features::metrics::{analyze_source, build_ast_graph, halstead_counts, ClassificationTable, HalsteadCounts};
use recsel::algo_features::parser::parse_file;
use recsel::algo_features::{AlgorithmFeatureTable, FeatureGroup};
use recsel::data::{Dataset, Interaction};
use recsel::experiment::{
    ci_half_width, evaluate_selector, make_user_folds, method_name, oracle_predictor, report, run_ablation, run_evaluation,
    run_importance, run_nested_cv, sba_predictor, AblationConfig, CvConfig, HpoSpace, MetaInputs, SBA_NAME, VBA_NAME,
};
use recsel::ground_truth::{apply_selector, gap_closed, ndcg_at_k, oracle_choices, sba, vba, PerformanceMatrix};
use recsel::meta::{standardize_fit, GbdtParams, Mode};
use recsel::pipeline;
use recsel::recommenders::implicitmf::{ImplicitMfConfig, ImplicitMfModel, Side};
use recsel::recommenders::{biasedmf, bpr, build_train_matrix, ease, portfolio_sources, PortfolioConfig, TrainMatrix};
use recsel::synth::{planted_dataset, PlantedConfig, ProbeManifest};
use recsel::user_features::UserFeatureTable;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn secs(d: Duration) -> String {
    format!("{:.2} s", d.as_secs_f64())
}

fn single_threaded<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .expect("thread pool")
        .install(f)
}

// ---------------------------------------------------------------------------
// 1. NDCG

fn brute_ndcg(ranking: &[String], relevant: &HashSet<String>, k: usize) -> f64 {
    let mut dcg = 0.0;
    for (pos, item) in ranking.iter().enumerate() {
        if pos < k && relevant.contains(item) {
            dcg += 1.0 / (pos as f64 + 2.0).log2();
        }
    }
    let mut idcg = 0.0;
    for pos in 0..relevant.len() {
        if pos < k {
            idcg += 1.0 / (pos as f64 + 2.0).log2();
        }
    }
    dcg / idcg
}

fn ndcg_oracle() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let universe = r.gen_range(1..=20);
        let mut items: Vec<String> = (0..universe).map(|i| format!("i{i}")).collect();
        items.shuffle(&mut r);
        let len = r.gen_range(0..=universe);
        let ranking = items[..len].to_vec();
        let n_rel = r.gen_range(1..=universe);
        let relevant: HashSet<String> = items.choose_multiple(&mut r, n_rel).cloned().collect();
        for k in [10, r.gen_range(1..=20)] {
            let got = ndcg_at_k(&ranking, &relevant, k).map_err(|e| e.to_string())?;
            let want = brute_ndcg(&ranking, &relevant, k);
            worst = worst.max((got - want).abs());
        }
    }
    let elapsed = start.elapsed();
    ensure!(worst <= 1e-12, "max deviation {worst:e}");
    ensure!(elapsed < Duration::from_secs(1), "took {}", secs(elapsed));
    Ok(format!("max |Δ| {worst:.1e}, {}", secs(elapsed)))
}

// ---------------------------------------------------------------------------
// 2. SBA / VBA

fn random_matrix(r: &mut ChaCha8Rng, users: usize, algos: usize) -> PerformanceMatrix {
    // values on a 0.1 grid so that ties are common
    let rows: Vec<Vec<f64>> = (0..users)
        .map(|_| (0..algos).map(|_| f64::from(r.gen_range(0..=10u8)) / 10.0).collect())
        .collect();
    PerformanceMatrix::from_rows(
        (0..users).map(|u| format!("u{u}")).collect(),
        (0..algos).map(|a| format!("a{a}")).collect(),
        &rows,
    )
    .unwrap()
}

fn brute_sba(rows: &[Vec<f64>]) -> (usize, f64) {
    let n = rows.len() as f64;
    let mut best = (0, f64::NEG_INFINITY);
    for a in 0..rows[0].len() {
        let mut sum = 0.0;
        for row in rows {
            sum += row[a];
        }
        if sum / n > best.1 {
            best = (a, sum / n);
        }
    }
    best
}

fn brute_vba(rows: &[Vec<f64>]) -> f64 {
    let mut sum = 0.0;
    for row in rows {
        sum += row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    }
    sum / rows.len() as f64
}

fn dense_rows(pm: &PerformanceMatrix) -> Vec<Vec<f64>> {
    (0..pm.n_users()).map(|u| pm.row(u).to_vec()).collect()
}

fn baselines() -> Outcome {
    let mut r = rng(2);
    for case in 0..100 {
        let (users, algos) = (r.gen_range(5..=30), r.gen_range(1..=7));
        let pm = random_matrix(&mut r, users, algos);
        let rows = dense_rows(&pm);
        ensure!(sba(&pm) == brute_sba(&rows), "case {case}: sba {:?} vs {:?}", sba(&pm), brute_sba(&rows));
        ensure!(vba(&pm) == brute_vba(&rows), "case {case}: vba");
        ensure!(vba(&pm) >= sba(&pm).1, "case {case}: VBA < SBA");
        ensure!(apply_selector(&pm, &oracle_choices(&pm)).unwrap().mean == vba(&pm), "case {case}: oracle choices");
        let constant = vec![sba(&pm).0; pm.n_users()];
        ensure!(apply_selector(&pm, &constant).unwrap().mean == sba(&pm).1, "case {case}: constant choice");

        // the same selectors through the fold protocol
        let k = r.gen_range(2..=5);
        let folds = make_user_folds(pm.users(), k, case).unwrap();
        let oracle = evaluate_selector(&pm, &folds, oracle_predictor(&pm)).map_err(|e| e.to_string())?;
        let fixed = evaluate_selector(&pm, &folds, sba_predictor(&pm)).map_err(|e| e.to_string())?;
        for f in 0..k {
            let test: Vec<Vec<f64>> = folds.members(f).iter().map(|&u| rows[u].clone()).collect();
            let train: Vec<Vec<f64>> = folds.train_members(f).iter().map(|&u| rows[u].clone()).collect();
            ensure!(oracle[f].0.ndcg == brute_vba(&test), "case {case} fold {f}: oracle");
            ensure!(oracle[f].0.top1 == 100.0, "case {case} fold {f}: oracle top-1");
            let choice = brute_sba(&train).0;
            let want = test.iter().map(|row| row[choice]).sum::<f64>() / test.len() as f64;
            ensure!(fixed[f].0.ndcg == want, "case {case} fold {f}: constant selector");
        }
    }

    // and through the full evaluation entry point
    let pm = random_matrix(&mut r, 40, 5);
    let dummy = vec![vec![0.0]; 40];
    let inputs = MetaInputs {
        pm: &pm,
        user_rows: dummy,
        user_names: vec!["x".into()],
        algorithms: None,
    };
    let cfg = CvConfig { k: 4, seed: 3, hpo: HpoSpace::default() };
    let rep = run_evaluation(&inputs, &[], &cfg).map_err(|e| e.to_string())?;
    let v = rep.method(VBA_NAME).unwrap();
    ensure!(v.mean_top1 == 100.0, "VBA top-1 {}", v.mean_top1);
    ensure!(rep.method(SBA_NAME).unwrap().mean_ndcg <= v.mean_ndcg, "report SBA > VBA");
    Ok("100 matrices exact; fold plumbing exact".into())
}

// ---------------------------------------------------------------------------
// 3. Gap arithmetic

fn gap_sanity() -> Outcome {
    let g = gap_closed(0.143, 0.128, 0.280).map_err(|e| e.to_string())?;
    ensure!((9.0..=11.0).contains(&g), "gap {g}");
    Ok(format!("gap closed {g:.2}%"))
}

// ---------------------------------------------------------------------------
// 4. Code metrics

fn counts(src: &str) -> HalsteadCounts {
    halstead_counts(&parse_file(src).unwrap(), ClassificationTable::bundled())
}

/// (source, distinct operators, distinct operands, total operators, total operands, complexity)
const SNIPPETS: [(&str, usize, usize, usize, usize, f64); 5] = [
    // fn = + | f a b 2
    ("fn f() { a = b + 2; }", 3, 4, 3, 4, 1.0),
    // fn -> if > else | g x i32 i32 x 0 x 0
    ("fn g(x: i32) -> i32 { if x > 0 { x } else { 0 } }", 5, 4, 5, 8, 2.0),
    // fn -> && || ! | h a bool b bool bool a b a
    ("fn h(a: bool, b: bool) -> bool { a && b || !a }", 5, 4, 5, 9, 3.0),
    // fn -> match => => => if > | m v u8 u8 v 0 1 n n 5 2 _ 3
    ("fn m(v: u8) -> u8 { match v { 0 => 1, n if n > 5 => 2, _ => 3 } }", 6, 10, 8, 13, 4.0),
    // fn mut while > -= for in .. | w i i64 i 0 i 1 _ 0 3
    ("fn w(mut i: i64) { while i > 0 { i -= 1; } for _ in 0..3 {} }", 8, 7, 8, 10, 3.0),
];

fn code_metrics() -> Outcome {
    // `a = b + 2` net of the enclosing function frame
    let with = counts("fn f() { a = b + 2; }");
    let frame = counts("fn f() {}");
    let net = HalsteadCounts {
        distinct_operators: with.distinct_operators - frame.distinct_operators,
        distinct_operands: with.distinct_operands - frame.distinct_operands,
        total_operators: with.total_operators - frame.total_operators,
        total_operands: with.total_operands - frame.total_operands,
    };
    ensure!(
        (net.distinct_operators, net.distinct_operands, net.total_operators, net.total_operands) == (2, 3, 2, 3),
        "assignment tally {net:?}"
    );
    ensure!((net.volume() - 11.61).abs() < 0.005, "volume {}", net.volume());
    ensure!(net.difficulty() == 1.0, "difficulty {}", net.difficulty());

    for (src, n1, n2, big_n1, big_n2, cc) in SNIPPETS {
        let c = counts(src);
        ensure!(
            (c.distinct_operators, c.distinct_operands, c.total_operators, c.total_operands) == (n1, n2, big_n1, big_n2),
            "`{src}`: got {c:?}"
        );
        let m = analyze_source("snippet.rs", src).map_err(|e| e.to_string())?;
        let volume = (big_n1 + big_n2) as f64 * ((n1 + n2) as f64).log2();
        let difficulty = (n1 as f64 / 2.0) * (big_n2 as f64 / n2 as f64);
        ensure!(m.hal_volume == volume, "`{src}`: volume {} vs {volume}", m.hal_volume);
        ensure!(m.hal_difficulty == difficulty, "`{src}`: difficulty {} vs {difficulty}", m.hal_difficulty);
        ensure!(m.average_cc_file == cc, "`{src}`: complexity {} vs {cc}", m.average_cc_file);
    }

    let sources = portfolio_sources();
    for (kind, name, text) in &sources {
        let m = analyze_source(name, text).map_err(|e| e.to_string())?;
        ensure!(
            (m.hal_effort - m.hal_volume * m.hal_difficulty).abs() <= 1e-12 * m.hal_effort.abs().max(1.0),
            "{kind}: effort identity"
        );
        let g = build_ast_graph(name, text).map_err(|e| e.to_string())?;
        ensure!(g.ast_transitivity == 0.0, "{kind}: transitivity {}", g.ast_transitivity);
        ensure!(g.ast_edge_count == g.ast_node_count - 1, "{kind}: {} edges, {} nodes", g.ast_edge_count, g.ast_node_count);
    }
    Ok(format!("6 hand tallies exact; {} portfolio files", sources.len()))
}

// ---------------------------------------------------------------------------
// 5. Recommender math

fn matrix(rows: &[(&str, &str, f64)]) -> TrainMatrix {
    let interactions = rows
        .iter()
        .enumerate()
        .map(|(t, &(u, i, r))| Interaction::new(u, i, r, t as i64))
        .collect();
    build_train_matrix(&Dataset::new("fixture", interactions)).unwrap()
}

fn gauss_jordan_inverse(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| f64::from(u8::from(i == j))));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs())).unwrap();
        m.swap(col, pivot);
        let p = m[col][col];
        m[col].iter_mut().for_each(|v| *v /= p);
        for row in 0..n {
            if row != col {
                let factor = m[row][col];
                let pivot_row = m[col].clone();
                m[row].iter_mut().zip(&pivot_row).for_each(|(v, pv)| *v -= factor * pv);
            }
        }
    }
    m.into_iter().map(|r| r[n..].to_vec()).collect()
}

fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-8)
}

fn central_difference(f: impl Fn(f64) -> f64) -> f64 {
    let h = 1e-6;
    (f(h) - f(-h)) / (2.0 * h)
}

fn recommender_math() -> Outcome {
    let start = Instant::now();

    // EASE on three items
    let m = matrix(&[("u1", "A", 1.0), ("u1", "B", 1.0), ("u2", "B", 1.0), ("u2", "C", 1.0), ("u3", "A", 1.0), ("u3", "C", 1.0), ("u4", "A", 1.0)]);
    let l2 = 0.5;
    let model = ease::train_ease(&m, &ease::EaseConfig { l2 }).map_err(|e| e.to_string())?;
    let mut x = vec![vec![0.0; 3]; m.n_users()];
    for (u, i, _) in m.entries() {
        x[u][i] = 1.0;
    }
    let gram: Vec<Vec<f64>> = (0..3)
        .map(|a| (0..3).map(|b| x.iter().map(|r| r[a] * r[b]).sum::<f64>() + if a == b { l2 } else { 0.0 }).collect())
        .collect();
    let p = gauss_jordan_inverse(&gram);
    for i in 0..3 {
        ensure!(model.weight(i, i) == 0.0, "EASE diagonal {i} = {}", model.weight(i, i));
        for j in 0..3 {
            if i != j {
                let want = -p[i][j] / p[j][j];
                ensure!((model.weight(i, j) - want).abs() < 1e-10, "EASE weight ({i},{j})");
            }
        }
    }

    // BiasedMF: gradient of 0.5 * (e^2 + reg * norms) against finite differences
    let toy = matrix(&[("a", "x", 4.0), ("a", "y", 2.0), ("b", "x", 5.0), ("b", "z", 1.0), ("c", "y", 3.0), ("c", "z", 4.0)]);
    let cfg = biasedmf::BiasedMfConfig { factors: 3, epochs: 3, lr: 0.01, reg: 0.1 };
    let mf = biasedmf::train_biasedmf(&toy, &cfg, 5).map_err(|e| e.to_string())?;
    let k = cfg.factors;
    let (u, i, r) = toy.entries()[3];
    let loss = |md: &biasedmf::BiasedMfModel| {
        let pu = &md.user_factors[u * k..(u + 1) * k];
        let qi = &md.item_factors[i * k..(i + 1) * k];
        let pred = md.global_mean + md.user_bias[u] + md.item_bias[i] + pu.iter().zip(qi).map(|(a, b)| a * b).sum::<f64>();
        let norms = md.user_bias[u].powi(2) + md.item_bias[i].powi(2) + pu.iter().chain(qi).map(|v| v * v).sum::<f64>();
        0.5 * ((r - pred).powi(2) + cfg.reg * norms)
    };
    let grad = mf.sample_gradient(u, i, r, cfg.reg);
    let nudge = |edit: &dyn Fn(&mut biasedmf::BiasedMfModel, f64)| {
        central_difference(|h| {
            let mut moved = mf.clone();
            edit(&mut moved, h);
            loss(&moved)
        })
    };
    let mut worst: f64 = relative_gap(grad.user_bias, nudge(&|md, h| md.user_bias[u] += h));
    worst = worst.max(relative_gap(grad.item_bias, nudge(&|md, h| md.item_bias[i] += h)));
    for f in 0..k {
        worst = worst.max(relative_gap(grad.user_factors[f], nudge(&|md, h| md.user_factors[u * k + f] += h)));
        worst = worst.max(relative_gap(grad.item_factors[f], nudge(&|md, h| md.item_factors[i * k + f] += h)));
    }
    ensure!(worst < 1e-4, "BiasedMF gradient relative error {worst:e}");

    // BPR: gradient of ln σ(x_ui − x_uj) − reg/2 · norms (ascent direction)
    let bcfg = bpr::BprConfig { factors: 3, epochs: 2, lr: 0.05, reg: 0.05 };
    let model = bpr::train_bpr(&toy, &bcfg, 8).map_err(|e| e.to_string())?;
    let (bu, bi, bj) = (0, 0, 2);
    let objective = |md: &bpr::BprModel| {
        let row = |v: &[f64], idx: usize| v[idx * k..(idx + 1) * k].to_vec();
        let (p, qi, qj) = (row(&md.user_factors, bu), row(&md.item_factors, bi), row(&md.item_factors, bj));
        let d: f64 = (0..k).map(|f| p[f] * (qi[f] - qj[f])).sum();
        let norms: f64 = p.iter().chain(&qi).chain(&qj).map(|v| v * v).sum();
        -(1.0 + (-d).exp()).ln() - 0.5 * bcfg.reg * norms
    };
    let g = model.triple_gradient(bu, bi, bj, bcfg.reg);
    let mut bpr_worst: f64 = 0.0;
    for f in 0..k {
        let on_user = central_difference(|h| {
            let mut moved = model.clone();
            moved.user_factors[bu * k + f] += h;
            objective(&moved)
        });
        let on_pos = central_difference(|h| {
            let mut moved = model.clone();
            moved.item_factors[bi * k + f] += h;
            objective(&moved)
        });
        let on_neg = central_difference(|h| {
            let mut moved = model.clone();
            moved.item_factors[bj * k + f] += h;
            objective(&moved)
        });
        bpr_worst = bpr_worst
            .max(relative_gap(g.user[f], on_user))
            .max(relative_gap(g.positive[f], on_pos))
            .max(relative_gap(g.negative[f], on_neg));
    }
    ensure!(bpr_worst < 1e-4, "BPR gradient relative error {bpr_worst:e}");

    // ALS half-steps on a 4 × 4 fixture, scored with an independent objective
    let als = matrix(&[
        ("u0", "i0", 1.0),
        ("u0", "i1", 3.0),
        ("u1", "i1", 1.0),
        ("u1", "i2", 2.0),
        ("u2", "i2", 1.0),
        ("u2", "i3", 1.0),
        ("u3", "i0", 2.0),
        ("u3", "i3", 1.0),
    ]);
    let acfg = ImplicitMfConfig { factors: 2, iters: 5, reg: 0.1, alpha: 2.0 };
    let mut observed = [[0.0; 4]; 4];
    for (u, i, r) in als.entries() {
        observed[u][i] = r;
    }
    let weighted = |md: &ImplicitMfModel| {
        let mut total = 0.0;
        for (u, row) in observed.iter().enumerate() {
            for (i, &r) in row.iter().enumerate() {
                let xy: f64 = (0..2).map(|f| md.user_factors[u * 2 + f] * md.item_factors[i * 2 + f]).sum();
                let pref = if r > 0.0 { 1.0 } else { 0.0 };
                total += (1.0 + acfg.alpha * r) * (pref - xy).powi(2);
            }
        }
        total + acfg.reg * md.user_factors.iter().chain(&md.item_factors).map(|v| v * v).sum::<f64>()
    };
    let mut mf = ImplicitMfModel::init(&als, acfg.factors, 9);
    let mut last = weighted(&mf);
    for step in 0..12 {
        let side = if step % 2 == 0 { Side::Users } else { Side::Items };
        mf.half_step(&als, &acfg, side).map_err(|e| e.to_string())?;
        let now = weighted(&mf);
        ensure!(now <= last * (1.0 + 1e-12), "ALS step {step}: {last} -> {now}");
        last = now;
    }

    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(10), "took {}", secs(elapsed));
    Ok(format!("MF rel err {worst:.1e}, BPR rel err {bpr_worst:.1e}, {}", secs(elapsed)))
}

// ---------------------------------------------------------------------------
// Planted pipeline inputs shared by 6, 7 and 9

struct Planted {
    pm: PerformanceMatrix,
    users: UserFeatureTable,
    algorithms: AlgorithmFeatureTable,
}

fn planted_pipeline(seed: u64) -> Planted {
    let ds = planted_dataset(&PlantedConfig::default()).unwrap();
    let split = pipeline::prepare_split(&ds).unwrap();
    let portfolio = PortfolioConfig::default();
    let (pm, _) = pipeline::ground_truth(&split, &portfolio, seed).unwrap();
    let users = pipeline::user_features(&split);
    let tags = load_conceptual_map(BUNDLED_MAP, &portfolio.ids()).unwrap();
    let (algorithms, _) =
        pipeline::algorithm_features(&portfolio, &ProbeManifest::default(), &tags, seed, TimingMode::Disabled).unwrap();
    Planted { pm, users, algorithms }
}

fn small_space(n_iter: usize) -> HpoSpace {
    HpoSpace {
        num_trees: [20, 80],
        learning_rate: [0.05, 0.3],
        max_depth: [2, 4],
        min_samples_leaf: [1, 10],
        subsample: [0.8, 1.0],
        n_iter,
        inner_k: 3,
        seed: 0,
    }
}

// ---------------------------------------------------------------------------
// 6. Planted structure end to end

/// Search budget for the ten-fold run; the default 50 candidates exceed the
/// single-threaded time limit on this machine class.
const PLANTED_HPO_ITERATIONS: usize = 10;

fn planted_end_to_end() -> Outcome {
    let start = Instant::now();
    let report = single_threaded(|| {
        let p = planted_pipeline(7);
        let inputs = MetaInputs::new(&p.pm, &p.users, Some(&p.algorithms)).unwrap();
        let cfg = CvConfig {
            k: 10,
            seed: 20_240_601,
            hpo: HpoSpace {
                n_iter: PLANTED_HPO_ITERATIONS,
                ..HpoSpace::default()
            },
        };
        run_evaluation(&inputs, &[Mode::UserOnly, Mode::UserAlgo], &cfg)
    })
    .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();

    let sba_m = report.method(SBA_NAME).unwrap();
    let vba_m = report.method(VBA_NAME).unwrap();
    let user_only = report.method(method_name(Mode::UserOnly)).unwrap();
    let user_algo = report.method(method_name(Mode::UserAlgo)).unwrap();
    let lift = vba_m.mean_ndcg - sba_m.mean_ndcg;
    ensure!(lift >= 0.02, "(a) VBA − SBA = {lift:.4}");
    let wins = user_only.folds.iter().zip(&sba_m.folds).filter(|(m, s)| m.ndcg > s.ndcg).count();
    ensure!(wins >= 9, "(b) M(User-Only) beats SBA in {wins}/10 folds");
    let chance = 100.0 / report.algorithms.len() as f64;
    let ci = user_algo.ci_top1.unwrap_or(f64::INFINITY);
    ensure!(
        user_algo.mean_top1 - ci > chance,
        "(c) Top-1 {:.1} ± {ci:.1} does not exclude chance {chance:.1}",
        user_algo.mean_top1
    );
    ensure!(elapsed < Duration::from_secs(300), "took {}", secs(elapsed));
    Ok(format!(
        "VBA−SBA {lift:.3}; User-Only wins {wins}/10; User+Algo Top-1 {:.1} ± {ci:.1}% vs chance {chance:.1}%; {}",
        user_algo.mean_top1,
        secs(elapsed)
    ))
}

// ---------------------------------------------------------------------------
// 7. Protocol hygiene

fn full_run(threads: usize, dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    pool.install(|| {
        let p = planted_pipeline(11);
        p.pm.write_csv(&dir.join("performance_matrix.csv")).unwrap();
        p.users.write_csv(&dir.join("user_features.csv")).unwrap();
        p.algorithms.write_csv(&dir.join("algorithm_features.csv")).unwrap();
        let inputs = MetaInputs::new(&p.pm, &p.users, Some(&p.algorithms)).unwrap();
        let cfg = CvConfig { k: 5, seed: 5, hpo: small_space(3) };
        let rep = run_evaluation(&inputs, &[Mode::UserOnly, Mode::UserAlgo], &cfg).unwrap();
        report::write_evaluation(&rep, dir).unwrap();
    });
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let path = e.unwrap().path();
            (path.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&path).unwrap())
        })
        .collect()
}

fn hygiene() -> Outcome {
    // user-disjoint folds on the planted users, every fold
    let p = planted_pipeline(7);
    let folds = make_user_folds(p.pm.users(), 10, 1).map_err(|e| e.to_string())?;
    folds.check_partition().map_err(|e| e.to_string())?;
    for f in 0..10 {
        let test: HashSet<usize> = folds.members(f).into_iter().collect();
        ensure!(folds.train_members(f).iter().all(|u| !test.contains(u)), "fold {f} leaks users");
    }

    // leakage canary: the scaler the learner carries is the training-fold fit
    let inputs = MetaInputs::new(&p.pm, &p.users, None).map_err(|e| e.to_string())?;
    let train = folds.train_members(0);
    let fold_rows: Vec<Vec<f64>> = train.iter().map(|&u| inputs.user_rows[u].clone()).collect();
    let fold_fit = standardize_fit(&fold_rows).map_err(|e| e.to_string())?;
    let global_fit = standardize_fit(&inputs.user_rows).map_err(|e| e.to_string())?;
    ensure!(fold_fit != global_fit, "fold and global scalers coincide");
    let learner = inputs
        .fit(Mode::UserOnly, &train, &GbdtParams { num_trees: 5, ..GbdtParams::default() })
        .map_err(|e| e.to_string())?;
    ensure!(learner.user_scaler == fold_fit, "learner scaler is not the training-fold fit");

    // whole-pipeline rerun, also across thread counts
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let first = full_run(1, a.path());
    let second = full_run(4, b.path());
    ensure!(first.len() == 6, "expected 6 artifacts, found {}", first.len());
    for (name, bytes) in &first {
        ensure!(second.get(name) == Some(bytes), "{name} differs between reruns");
    }
    Ok(format!("10 disjoint folds; canary ok; {} artifacts byte-identical", first.len()))
}

// ---------------------------------------------------------------------------
// 8. Statistics

fn statistics() -> Outcome {
    let ci = ci_half_width(&[0.1, 0.2, 0.3], 0.95).ok_or("no CI")?;
    ensure!((ci - 0.2484).abs() < 1e-4, "CI half-width {ci}");

    // three algorithms; feature x0 alone decides which one wins
    let mut r = rng(8);
    let n = 60;
    let mut rows = Vec::new();
    let mut perf = Vec::new();
    for _ in 0..n {
        let x: Vec<f64> = (0..4).map(|_| r.gen_range(0.0..1.0)).collect();
        let jitter = r.gen_range(0.0..0.05);
        perf.push(if x[0] < 0.5 { vec![0.8 + jitter, 0.2, 0.1] } else { vec![0.1, 0.3, 0.9 - jitter] });
        rows.push(x);
    }
    let pm = PerformanceMatrix::from_rows(
        (0..n).map(|u| format!("u{u}")).collect(),
        vec!["A".into(), "B".into(), "C".into()],
        &perf,
    )
    .unwrap();
    let table = AlgorithmFeatureTable::new(
        vec!["A".into(), "B".into(), "C".into()],
        vec!["code.sloc".into(), "perf.perf_on_p".into()],
        vec![vec![10.0, 0.5], vec![20.0, 0.2], vec![30.0, 0.7]],
        vec!["conceptual.family".into()],
        vec![vec!["Popularity".into()], vec!["Neighborhood".into()], vec!["Neighborhood".into()]],
    )
    .map_err(|e| e.to_string())?;
    let inputs = MetaInputs {
        pm: &pm,
        user_rows: rows,
        user_names: (0..4).map(|i| format!("x{i}")).collect(),
        algorithms: Some(&table),
    };
    let imp = run_importance(&inputs, &CvConfig { k: 5, seed: 2, hpo: small_space(3) }).map_err(|e| e.to_string())?;
    let total: f64 = imp.iter().map(|row| row.mean).sum();
    ensure!((total - 1.0).abs() <= 1e-6, "importances sum to {total}");
    ensure!(imp[0].feature == "x0", "top feature is {}", imp[0].feature);
    Ok(format!("CI {ci:.4}; importance sum {total:.9}; top {} ({:.3})", imp[0].feature, imp[0].mean))
}

// ---------------------------------------------------------------------------
// 9. Ablation equivalences

fn ablation_equivalence() -> Outcome {
    let p = planted_pipeline(7);
    let with_algos = MetaInputs::new(&p.pm, &p.users, Some(&p.algorithms)).map_err(|e| e.to_string())?;
    let without = MetaInputs::new(&p.pm, &p.users, None).map_err(|e| e.to_string())?;
    let cfg = CvConfig { k: 5, seed: 9, hpo: small_space(3) };
    let arms = [
        AblationConfig { name: "User-Only".into(), groups: vec![] },
        AblationConfig { name: "User+All".into(), groups: FeatureGroup::ALL.to_vec() },
    ];
    let ablation = run_ablation(&with_algos, &arms, &cfg).map_err(|e| e.to_string())?;
    let user_only = run_nested_cv(&without, Mode::UserOnly, &cfg).map_err(|e| e.to_string())?;
    let user_algo = run_nested_cv(&with_algos, Mode::UserAlgo, &cfg).map_err(|e| e.to_string())?;
    let as_json = |v: &dyn erased::Json| v.json();
    ensure!(ablation.rows[0].summary == user_only.methods[2], "empty arm differs from user-only");
    ensure!(ablation.rows[1].summary == user_algo.methods[2], "full arm differs from user+algo");
    ensure!(as_json(&ablation.rows[0].summary) == as_json(&user_only.methods[2]), "empty arm serializes differently");
    ensure!(as_json(&ablation.rows[1].summary) == as_json(&user_algo.methods[2]), "full arm serializes differently");
    ensure!(ablation.rows[1].algorithm_columns == p.algorithms.encoded_width(), "full arm column count");
    Ok(format!(
        "empty arm ≡ user-only ({:.4}); full arm ≡ user+algo ({:.4})",
        user_only.methods[2].mean_ndcg, user_algo.methods[2].mean_ndcg
    ))
}

mod erased {
    pub trait Json {
        fn json(&self) -> String;
    }

    impl<T: serde::Serialize> Json for T {
        fn json(&self) -> String {
            serde_json::to_string(self).expect("serializes")
        }
    }
}

// ---------------------------------------------------------------------------

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 9] = [
        (1, "NDCG oracle equivalence", ndcg_oracle),
        (2, "SBA/VBA correctness", baselines),
        (3, "gap arithmetic", gap_sanity),
        (4, "code-metric oracles", code_metrics),
        (5, "recommender math", recommender_math),
        (6, "planted structure end to end", planted_end_to_end),
        (7, "protocol hygiene", hygiene),
        (8, "statistics", statistics),
        (9, "ablation equivalences", ablation_equivalence),
    ];
    let filter: Option<u32> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|v| v.parse().ok());
    let mut failed = 0;
    for (id, title, run) in criteria {
        if filter.is_some_and(|only| only != id) {
            continue;
        }
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into());
            Err(msg)
        });
        match outcome {
            Ok(detail) => println!("criterion {id} [{title}]: PASS ({detail})"),
            Err(why) => {
                failed += 1;
                println!("criterion {id} [{title}]: FAIL ({why})");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
