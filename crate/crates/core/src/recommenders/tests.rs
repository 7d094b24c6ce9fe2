use super::*;
use crate::data::Interaction;

fn dataset(rows: &[(&str, &str, f64)]) -> Dataset {
    let interactions = rows
        .iter()
        .enumerate()
        .map(|(t, &(u, i, r))| Interaction::new(u, i, r, t as i64))
        .collect();
    Dataset::new("toy", interactions)
}

fn matrix(rows: &[(&str, &str, f64)]) -> TrainMatrix {
    build_train_matrix(&dataset(rows)).unwrap()
}

/// 6 users x 20 items with varied overlap.
fn toy20() -> TrainMatrix {
    let mut rows = Vec::new();
    let users = ["u0", "u1", "u2", "u3", "u4", "u5"];
    let items: Vec<String> = (0..20).map(|i| format!("i{i:02}")).collect();
    for (u, name) in users.iter().enumerate() {
        for (i, item) in items.iter().enumerate() {
            if (i * 7 + u * 3) % 5 < 2 || i == u {
                rows.push((name.to_string(), item.clone(), 1.0 + ((i + u) % 5) as f64));
            }
        }
    }
    let rows: Vec<(&str, &str, f64)> = rows.iter().map(|(u, i, r)| (u.as_str(), i.as_str(), *r)).collect();
    matrix(&rows)
}

fn brute_cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

fn dense(m: &TrainMatrix, binary: bool) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; m.n_items()]; m.n_users()];
    for (u, i, r) in m.entries() {
        out[u][i] = if binary { 1.0 } else { r };
    }
    out
}

// ---- train matrix ----------------------------------------------------------

#[test]
fn empty_train_split_is_rejected() {
    assert!(matches!(build_train_matrix(&Dataset::new("e", vec![])), Err(Error::EmptyDataset(_))));
}

#[test]
fn matrix_cardinality_and_counts() {
    let m = matrix(&[("a", "x", 1.0), ("a", "y", 2.0), ("b", "x", 3.0)]);
    assert_eq!(m.nnz(), 3);
    let mut brute = vec![0usize; m.n_items()];
    for (_, i, _) in m.entries() {
        brute[i] += 1;
    }
    assert_eq!(m.item_counts(), brute.as_slice());
    assert_eq!(m.item_counts(), &[2, 1]);
}

// ---- popularity ------------------------------------------------------------

#[test]
fn pop_ranks_by_count() {
    let m = matrix(&[("u1", "B", 1.0), ("u1", "A", 1.0), ("u2", "A", 1.0), ("u3", "A", 1.0)]);
    let model = train(&AlgorithmConfig::Pop, &m, 0).unwrap();
    let list = recommend_top_k(&model, &m, "u2", 10, false).unwrap();
    assert_eq!(list.items, ["A", "B"]);
}

#[test]
fn pop_ties_follow_index_order() {
    let m = matrix(&[("u1", "c", 1.0), ("u1", "a", 1.0), ("u2", "b", 1.0)]);
    let model = train(&AlgorithmConfig::Pop, &m, 0).unwrap();
    let list = recommend_top_k(&model, &m, "u1", 3, false).unwrap();
    assert_eq!(list.items, ["c", "a", "b"]);
}

#[test]
fn pop_top_k_matches_sorted_frequencies() {
    let m = toy20();
    let model = train(&AlgorithmConfig::Pop, &m, 0).unwrap();
    let mut freq: Vec<(usize, usize)> = m.item_counts().iter().copied().enumerate().collect();
    freq.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let expected: Vec<usize> = freq.iter().take(5).map(|&(i, _)| i).collect();
    let got: Vec<usize> = recommend_dense(&model, &m, 0, 5, false).iter().map(|&(i, _)| i).collect();
    assert_eq!(got, expected);
}

#[test]
fn pop_recommends_same_list_to_everyone() {
    let m = toy20();
    let model = train(&AlgorithmConfig::Pop, &m, 0).unwrap();
    let first: Vec<usize> = recommend_dense(&model, &m, 0, 10, false).iter().map(|p| p.0).collect();
    for u in 1..m.n_users() {
        let other: Vec<usize> = recommend_dense(&model, &m, u, 10, false).iter().map(|p| p.0).collect();
        assert_eq!(first, other);
    }
}

// ---- neighborhoods ---------------------------------------------------------

#[test]
fn itemknn_identical_and_disjoint_items() {
    let m = matrix(&[("u1", "A", 1.0), ("u1", "B", 1.0), ("u2", "A", 1.0), ("u2", "B", 1.0), ("u3", "C", 1.0)]);
    let model = itemknn::train_itemknn(&m, &itemknn::ItemKnnConfig::default());
    let a = m.items().get("A").unwrap();
    let b = m.items().get("B").unwrap();
    let c = m.items().get("C").unwrap();
    assert_eq!(model.neighbors[a].len(), 1);
    assert_eq!(model.neighbors[a][0].0, b);
    assert!((model.neighbors[a][0].1 - 1.0).abs() < 1e-12);
    // disjoint user sets have cosine 0 and are not kept as neighbors
    assert!(model.neighbors[c].is_empty());
}

#[test]
fn itemknn_matches_brute_force_cosines() {
    let m = matrix(&[
        ("u1", "A", 5.0),
        ("u1", "B", 3.0),
        ("u2", "A", 4.0),
        ("u2", "C", 1.0),
        ("u3", "B", 2.0),
        ("u3", "C", 5.0),
    ]);
    let cfg = itemknn::ItemKnnConfig {
        neighbors: 10,
        vectors: VectorMode::Rating,
    };
    let model = itemknn::train_itemknn(&m, &cfg);
    let x = dense(&m, false);
    let column = |i: usize| -> Vec<f64> { x.iter().map(|row| row[i]).collect() };
    for i in 0..3 {
        for &(j, sim) in &model.neighbors[i] {
            assert!((sim - brute_cosine(&column(i), &column(j))).abs() < 1e-12);
        }
        assert_eq!(model.neighbors[i].len(), 2);
    }
}

#[test]
fn userknn_identical_and_disjoint_users() {
    let m = matrix(&[("u1", "A", 1.0), ("u1", "B", 1.0), ("u2", "A", 1.0), ("u2", "B", 1.0), ("u3", "C", 1.0)]);
    let model = userknn::train_userknn(&m, &userknn::UserKnnConfig::default());
    assert_eq!(model.neighbors[0].len(), 1);
    assert_eq!(model.neighbors[0][0].0, 1);
    assert!((model.neighbors[0][0].1 - 1.0).abs() < 1e-12);
    assert!(model.neighbors[2].is_empty());
}

#[test]
fn userknn_matches_brute_force_cosines() {
    let m = toy20();
    let cfg = userknn::UserKnnConfig {
        neighbors: 3,
        vectors: VectorMode::Rating,
    };
    let model = userknn::train_userknn(&m, &cfg);
    let x = dense(&m, false);
    for u in 0..m.n_users() {
        let mut brute: Vec<(usize, f64)> = (0..m.n_users())
            .filter(|&v| v != u)
            .map(|v| (v, brute_cosine(&x[u], &x[v])))
            .filter(|&(_, s)| s > 0.0)
            .collect();
        brute.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        brute.truncate(3);
        assert_eq!(model.neighbors[u].len(), brute.len());
        for (got, want) in model.neighbors[u].iter().zip(&brute) {
            assert_eq!(got.0, want.0);
            assert!((got.1 - want.1).abs() < 1e-12);
        }
    }
}

#[test]
fn auto_vectors_binarize_implicit_data() {
    let ds = dataset(&[("u", "a", 2.0), ("u", "b", 4.0)]);
    let explicit = build_train_matrix(&ds).unwrap();
    assert!(!explicit.binary_vectors(VectorMode::Auto));
    let implicit = build_train_matrix(&ds.clone().with_feedback(Feedback::Implicit)).unwrap();
    assert!(implicit.binary_vectors(VectorMode::Auto));
    let flat = matrix(&[("u", "a", 1.0), ("u", "b", 1.0)]);
    assert!(flat.binary_vectors(VectorMode::Auto));
}

// ---- biased MF -------------------------------------------------------------

#[test]
fn biasedmf_without_factors_is_bias_only() {
    let m = toy20();
    let cfg = biasedmf::BiasedMfConfig {
        factors: 0,
        epochs: 5,
        lr: 0.01,
        reg: 0.02,
    };
    let model = biasedmf::train_biasedmf(&m, &cfg, 1).unwrap();
    for u in 0..m.n_users() {
        for i in 0..m.n_items() {
            let expected = model.global_mean + model.user_bias[u] + model.item_bias[i];
            assert_eq!(model.predict(u, i), expected);
        }
    }
}

#[test]
fn biasedmf_fits_rank_one_ratings() {
    let user_f = [0.5, 1.0, 1.5, 2.0, 2.5];
    let item_f = [1.0, 2.0, 3.0, 1.5, 0.5, 2.5];
    let names_u: Vec<String> = (0..5).map(|u| format!("u{u}")).collect();
    let names_i: Vec<String> = (0..6).map(|i| format!("i{i}")).collect();
    let mut rows = Vec::new();
    for (u, fu) in user_f.iter().enumerate() {
        for (i, fi) in item_f.iter().enumerate() {
            rows.push((names_u[u].as_str(), names_i[i].as_str(), fu * fi));
        }
    }
    let m = matrix(&rows);
    let cfg = biasedmf::BiasedMfConfig {
        factors: 2,
        epochs: 3000,
        lr: 0.01,
        reg: 0.0,
    };
    let model = biasedmf::train_biasedmf(&m, &cfg, 3).unwrap();
    let sse: f64 = m.entries().iter().map(|&(u, i, r)| (r - model.predict(u, i)).powi(2)).sum();
    let rmse = (sse / m.nnz() as f64).sqrt();
    assert!(rmse < 0.05, "rmse {rmse}");
}

#[test]
fn biasedmf_objective_does_not_increase() {
    let m = toy20();
    let cfg = biasedmf::BiasedMfConfig {
        factors: 3,
        epochs: 40,
        lr: 0.005,
        reg: 0.05,
    };
    let (_, trace) = biasedmf::train_with_trace(&m, &cfg, 11).unwrap();
    for w in trace.windows(2) {
        assert!(w[1] <= w[0] + 1e-6, "objective rose {} -> {}", w[0], w[1]);
    }
}

#[test]
fn biasedmf_gradient_matches_finite_differences() {
    let m = toy20();
    let cfg = biasedmf::BiasedMfConfig {
        factors: 3,
        epochs: 2,
        lr: 0.01,
        reg: 0.1,
    };
    let model = biasedmf::train_biasedmf(&m, &cfg, 5).unwrap();
    let (u, i, r) = m.entries()[7];
    let grad = model.sample_gradient(u, i, r, cfg.reg);
    let h = 1e-6;
    let fd = |perturb: &dyn Fn(&mut biasedmf::BiasedMfModel, f64)| {
        let mut plus = model.clone();
        perturb(&mut plus, h);
        let mut minus = model.clone();
        perturb(&mut minus, -h);
        (plus.sample_loss(u, i, r, cfg.reg) - minus.sample_loss(u, i, r, cfg.reg)) / (2.0 * h)
    };
    let check = |analytic: f64, numeric: f64| {
        let rel = (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-8);
        assert!(rel < 1e-4, "analytic {analytic} vs numeric {numeric}");
    };
    check(grad.user_bias, fd(&|md, d| md.user_bias[u] += d));
    check(grad.item_bias, fd(&|md, d| md.item_bias[i] += d));
    for f in 0..3 {
        check(grad.user_factors[f], fd(&|md, d| md.user_factors[u * 3 + f] += d));
        check(grad.item_factors[f], fd(&|md, d| md.item_factors[i * 3 + f] += d));
    }
}

#[test]
fn biasedmf_divergence_names_learning_rate() {
    let m = toy20();
    let cfg = biasedmf::BiasedMfConfig {
        factors: 4,
        epochs: 50,
        lr: 50.0,
        reg: 0.0,
    };
    match biasedmf::train_biasedmf(&m, &cfg, 1) {
        Err(Error::Divergence { lr }) => assert_eq!(lr, 50.0),
        other => panic!("expected divergence, got {other:?}"),
    }
}

// ---- implicit MF -----------------------------------------------------------

fn toy4x4() -> TrainMatrix {
    matrix(&[
        ("u0", "i0", 1.0),
        ("u0", "i1", 3.0),
        ("u1", "i1", 1.0),
        ("u1", "i2", 2.0),
        ("u2", "i2", 1.0),
        ("u2", "i3", 1.0),
        ("u3", "i0", 2.0),
        ("u3", "i3", 1.0),
    ])
}

fn als_cfg() -> implicitmf::ImplicitMfConfig {
    implicitmf::ImplicitMfConfig {
        factors: 2,
        iters: 5,
        reg: 0.1,
        alpha: 2.0,
    }
}

#[test]
fn implicitmf_single_cell_ranks_first() {
    let m = matrix(&[("u", "i", 1.0)]);
    let model = train(&AlgorithmConfig::ImplicitMf(als_cfg()), &m, 0).unwrap();
    let list = recommend_top_k(&model, &m, "u", 10, false).unwrap();
    assert_eq!(list.items, ["i"]);
}

#[test]
fn als_half_steps_do_not_increase_objective() {
    use implicitmf::Side;
    let m = toy4x4();
    let cfg = als_cfg();
    let mut model = implicitmf::ImplicitMfModel::init(&m, cfg.factors, 9);
    let mut last = model.objective(&m, &cfg);
    for _ in 0..6 {
        for side in [Side::Users, Side::Items] {
            model.half_step(&m, &cfg, side).unwrap();
            let now = model.objective(&m, &cfg);
            assert!(now <= last + 1e-12, "{last} -> {now}");
            last = now;
        }
    }
}

#[test]
fn als_solution_satisfies_normal_equations() {
    use implicitmf::Side;
    let m = toy4x4();
    let cfg = als_cfg();
    let model = implicitmf::train_implicitmf(&m, &cfg, 4).unwrap();
    // the last half-step solved items, so item rows satisfy their equations
    for i in 0..m.n_items() {
        let (a, b) = model.normal_equations(&m, &cfg, Side::Items, i);
        let x = nalgebra::DVector::from_column_slice(&model.item_factors[i * 2..i * 2 + 2]);
        let residual = (a * x - b).norm();
        assert!(residual < 1e-8, "residual {residual}");
    }
}

#[test]
fn als_solved_rows_are_local_minima() {
    let m = toy4x4();
    let cfg = als_cfg();
    let model = implicitmf::train_implicitmf(&m, &cfg, 4).unwrap();
    let base = model.objective(&m, &cfg);
    let eps = 1e-3;
    for idx in 0..model.item_factors.len() {
        for sign in [-1.0, 1.0] {
            let mut moved = model.clone();
            moved.item_factors[idx] += sign * eps;
            assert!(moved.objective(&m, &cfg) > base);
        }
    }
}

// ---- BPR -------------------------------------------------------------------

#[test]
fn bpr_prefers_observed_item() {
    let m = matrix(&[("u", "A", 1.0), ("v", "A", 1.0), ("v", "B", 1.0)]);
    let cfg = bpr::BprConfig {
        factors: 4,
        epochs: 300,
        lr: 0.1,
        reg: 0.001,
    };
    let model = bpr::train_bpr(&m, &cfg, 2).unwrap();
    let u = m.users().get("u").unwrap();
    let a = m.items().get("A").unwrap();
    let b = m.items().get("B").unwrap();
    assert!(model.score(u, a) > model.score(u, b));
}

#[test]
fn log_sigmoid_derivative_matches_finite_differences() {
    let h = 1e-5;
    for d in [-8.0, -2.5, -0.3, 0.0, 0.7, 3.0, 9.0] {
        let numeric = (bpr::log_sigmoid(d + h) - bpr::log_sigmoid(d - h)) / (2.0 * h);
        assert!((numeric - bpr::log_sigmoid_grad(d)).abs() < 1e-6);
    }
}

#[test]
fn bpr_triple_gradient_matches_finite_differences() {
    let m = toy20();
    let cfg = bpr::BprConfig {
        factors: 3,
        epochs: 1,
        lr: 0.05,
        reg: 0.05,
    };
    let model = bpr::train_bpr(&m, &cfg, 8).unwrap();
    let (u, i, j) = (2, 3, 11);
    assert!(!m.has_seen(u, j));
    let grad = model.triple_gradient(u, i, j, cfg.reg);
    let h = 1e-6;
    let k = 3;
    let check = |analytic: f64, index: usize, users: bool| {
        let mut plus = model.clone();
        let mut minus = model.clone();
        if users {
            plus.user_factors[index] += h;
            minus.user_factors[index] -= h;
        } else {
            plus.item_factors[index] += h;
            minus.item_factors[index] -= h;
        }
        let numeric = (plus.triple_objective(u, i, j, cfg.reg) - minus.triple_objective(u, i, j, cfg.reg)) / (2.0 * h);
        let rel = (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-8);
        assert!(rel < 1e-4, "analytic {analytic} numeric {numeric}");
    };
    for f in 0..k {
        check(grad.user[f], u * k + f, true);
        check(grad.positive[f], i * k + f, false);
        check(grad.negative[f], j * k + f, false);
    }
}

#[test]
fn bpr_zero_epochs_still_yields_valid_lists() {
    let m = toy20();
    let cfg = bpr::BprConfig {
        factors: 4,
        epochs: 0,
        lr: 0.05,
        reg: 0.01,
    };
    let model = train(&AlgorithmConfig::Bpr(cfg), &m, 1).unwrap();
    let list = recommend_top_k(&model, &m, "u0", 10, true).unwrap();
    let unseen = (0..m.n_items()).filter(|&i| !m.has_seen(0, i)).count();
    assert_eq!(list.items.len(), unseen.min(10));
}

// ---- EASE ------------------------------------------------------------------

/// Gauss-Jordan inverse with partial pivoting.
fn gauss_jordan_inverse(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut aug: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(r, row)| {
            let mut v = row.clone();
            v.extend((0..n).map(|c| if c == r { 1.0 } else { 0.0 }));
            v
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&x, &y| aug[x][col].abs().total_cmp(&aug[y][col].abs())).unwrap();
        aug.swap(col, pivot);
        let p = aug[col][col];
        for v in aug[col].iter_mut() {
            *v /= p;
        }
        for r in 0..n {
            if r != col {
                let factor = aug[r][col];
                let pivot_row = aug[col].clone();
                for (v, pv) in aug[r].iter_mut().zip(pivot_row) {
                    *v -= factor * pv;
                }
            }
        }
    }
    aug.into_iter().map(|row| row[n..].to_vec()).collect()
}

fn ease_toy() -> TrainMatrix {
    matrix(&[("u1", "A", 1.0), ("u1", "B", 1.0), ("u2", "B", 1.0), ("u2", "C", 1.0), ("u3", "A", 1.0), ("u3", "C", 1.0), ("u4", "A", 1.0)])
}

#[test]
fn ease_diagonal_is_exactly_zero() {
    let model = ease::train_ease(&toy20(), &ease::EaseConfig { l2: 5.0 }).unwrap();
    for i in 0..model.n_items {
        assert_eq!(model.weight(i, i), 0.0);
    }
}

#[test]
fn ease_matches_dense_inverse_oracle() {
    let m = ease_toy();
    let l2 = 0.5;
    let model = ease::train_ease(&m, &ease::EaseConfig { l2 }).unwrap();
    let x = dense(&m, true);
    let n = m.n_items();
    let mut g = vec![vec![0.0; n]; n];
    for (a, row) in g.iter_mut().enumerate() {
        for (b, cell) in row.iter_mut().enumerate() {
            *cell = x.iter().map(|xu| xu[a] * xu[b]).sum::<f64>() + if a == b { l2 } else { 0.0 };
        }
    }
    let p = gauss_jordan_inverse(&g);
    for i in 0..n {
        for j in 0..n {
            let expected = if i == j { 0.0 } else { -p[i][j] / p[j][j] };
            assert!((model.weight(i, j) - expected).abs() < 1e-10);
        }
    }
}

#[test]
fn ease_gram_times_inverse_is_identity() {
    let m = ease_toy();
    let g = ease::gram_matrix(&m, 0.5);
    let p = g.clone().cholesky().unwrap().inverse();
    let residual = (g * p - nalgebra::DMatrix::identity(3, 3)).abs().max();
    assert!(residual < 1e-8);
}

#[test]
fn ease_huge_l2_shrinks_weights() {
    let model = ease::train_ease(&ease_toy(), &ease::EaseConfig { l2: 1e9 }).unwrap();
    let norm = model.weights.iter().map(|w| w * w).sum::<f64>().sqrt();
    assert!(norm < 1e-8, "norm {norm}");
}

#[test]
fn ease_rejects_nonpositive_l2() {
    assert!(matches!(
        ease::train_ease(&ease_toy(), &ease::EaseConfig { l2: 0.0 }),
        Err(Error::GramInversion { .. })
    ));
}

// ---- top-k -----------------------------------------------------------------

fn all_configs() -> Vec<AlgorithmConfig> {
    let mut out = PortfolioConfig::default().algorithms;
    for cfg in &mut out {
        match cfg {
            AlgorithmConfig::BiasedMf(c) => c.epochs = 5,
            AlgorithmConfig::ImplicitMf(c) => c.iters = 3,
            AlgorithmConfig::Bpr(c) => c.epochs = 5,
            AlgorithmConfig::Ease(c) => c.l2 = 10.0,
            _ => {}
        }
    }
    out
}

#[test]
fn short_candidate_pool_is_not_padded() {
    let m = matrix(&[("u", "a", 1.0), ("u", "b", 1.0), ("v", "c", 1.0)]);
    let model = train(&AlgorithmConfig::Pop, &m, 0).unwrap();
    let list = recommend_top_k(&model, &m, "u", 10, true).unwrap();
    assert_eq!(list.items, ["c"]);
}

#[test]
fn unknown_user_is_cold_start() {
    let m = toy20();
    let model = train(&AlgorithmConfig::Pop, &m, 0).unwrap();
    assert!(matches!(recommend_top_k(&model, &m, "nobody", 10, true), Err(Error::ColdStart(_))));
}

#[test]
fn every_algorithm_matches_exhaustive_sort() {
    let m = toy20();
    for cfg in all_configs() {
        let model = train(&cfg, &m, 17).unwrap();
        for u in 0..m.n_users() {
            let scores = model.scores(&m, u);
            let mut brute: Vec<(usize, f64)> = scores
                .iter()
                .copied()
                .enumerate()
                .filter(|&(i, _)| !m.has_seen(u, i))
                .collect();
            brute.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
            brute.truncate(10);
            assert_eq!(recommend_dense(&model, &m, u, 10, true), brute, "{}", cfg.kind());
        }
    }
}

#[test]
fn lists_are_valid_for_every_algorithm_and_user() {
    let m = toy20();
    for cfg in all_configs() {
        let model = train(&cfg, &m, 3).unwrap();
        for user in m.users().ids() {
            let list = recommend_top_k(&model, &m, user, 10, true).unwrap();
            let u = m.users().get(user).unwrap();
            assert!(list.items.len() <= 10);
            assert!(list.scores.windows(2).all(|w| w[0] >= w[1]));
            assert!(list.scores.iter().all(|s| s.is_finite()));
            let mut dedup = list.items.clone();
            dedup.sort();
            dedup.dedup();
            assert_eq!(dedup.len(), list.items.len());
            assert!(list.items.iter().all(|i| !m.has_seen(u, m.items().get(i).unwrap())));
        }
    }
}

#[test]
fn training_is_deterministic_under_seed() {
    let m = toy20();
    for cfg in all_configs() {
        let a = train(&cfg, &m, 99).unwrap();
        let b = train(&cfg, &m, 99).unwrap();
        assert_eq!(a.state, b.state, "{}", cfg.kind());
    }
}

#[test]
fn model_artifact_round_trips() {
    let m = toy20();
    let dir = tempfile::tempdir().unwrap();
    for cfg in all_configs() {
        let model = train(&cfg, &m, 5).unwrap();
        let path = dir.path().join(format!("{}.json", cfg.kind()));
        model.save(&path).unwrap();
        assert_eq!(RecommenderModel::load(&path).unwrap(), model);
    }
}

#[test]
fn portfolio_config_parses_and_validates() {
    let text = r#"
        [[algorithm]]
        id = "Pop"
        [[algorithm]]
        id = "ItemKNN"
        neighbors = 15
        [[algorithm]]
        id = "EASE"
        l2 = 100.0
        [[unavailable]]
        id = "FISM"
        reason = "too slow"
    "#;
    let cfg = PortfolioConfig::from_toml(text).unwrap();
    assert_eq!(cfg.ids(), ["Pop", "ItemKNN", "EASE"]);
    let dup = "[[algorithm]]\nid = \"Pop\"\n[[algorithm]]\nid = \"Pop\"\n";
    assert!(PortfolioConfig::from_toml(dup).is_err());
    let typo = "[[algorithm]]\nid = \"ItemKNN\"\nneighbours = 3\n";
    assert!(PortfolioConfig::from_toml(typo).is_err());
}
