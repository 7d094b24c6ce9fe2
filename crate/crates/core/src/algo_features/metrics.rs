//! Static code metrics and syntax-tree graph metrics.

use std::collections::{HashMap, HashSet};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::lexer::tokenize;
use super::parser::{parse_file, LeafClass, Leaf, NodeKind, SyntaxNode};
use crate::error::{Error, Result};

/// Checked-in token classification table.
pub const CLASSIFICATION_TOML: &str = include_str!("classification.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DecisionPoint {
    #[serde(rename = "if")]
    If,
    #[serde(rename = "while")]
    While,
    #[serde(rename = "for")]
    For,
    #[serde(rename = "loop")]
    Loop,
    #[serde(rename = "&&")]
    And,
    #[serde(rename = "||")]
    Or,
    #[serde(rename = "match_arm")]
    MatchArm,
    #[serde(rename = "match_guard")]
    MatchGuard,
    #[serde(rename = "?")]
    Try,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct OperatorTable {
    symbols: Vec<String>,
    keywords: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct OperandTable {
    keywords: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComplexityTable {
    decision_points: Vec<DecisionPoint>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassificationTable {
    pub version: u32,
    operators: OperatorTable,
    operands: OperandTable,
    complexity: ComplexityTable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Operator,
    Operand,
}

impl ClassificationTable {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config(format!("classification table: {e}")))
    }

    /// The checked-in table.
    pub fn bundled() -> &'static ClassificationTable {
        static TABLE: OnceLock<ClassificationTable> = OnceLock::new();
        TABLE.get_or_init(|| Self::from_toml(CLASSIFICATION_TOML).expect("bundled classification table is valid"))
    }

    /// Halstead role of a leaf; `None` for leaves the table does not list.
    pub fn role(&self, leaf: &Leaf) -> Option<Role> {
        let listed = |list: &[String]| list.iter().any(|s| *s == leaf.text);
        match leaf.class {
            LeafClass::Ident | LeafClass::Literal => Some(Role::Operand),
            LeafClass::Symbol => listed(&self.operators.symbols).then_some(Role::Operator),
            LeafClass::Keyword if listed(&self.operators.keywords) => Some(Role::Operator),
            LeafClass::Keyword if listed(&self.operands.keywords) => Some(Role::Operand),
            LeafClass::Keyword => None,
        }
    }

    pub fn decision_points(&self) -> &[DecisionPoint] {
        &self.complexity.decision_points
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct HalsteadCounts {
    pub distinct_operators: usize,
    pub distinct_operands: usize,
    pub total_operators: usize,
    pub total_operands: usize,
}

impl HalsteadCounts {
    pub fn vocabulary(&self) -> usize {
        self.distinct_operators + self.distinct_operands
    }

    pub fn length(&self) -> usize {
        self.total_operators + self.total_operands
    }

    /// `N * log2(n)`.
    pub fn volume(&self) -> f64 {
        let n = self.vocabulary();
        if n == 0 {
            0.0
        } else {
            self.length() as f64 * (n as f64).log2()
        }
    }

    /// `(n1 / 2) * (N2 / n2)`.
    pub fn difficulty(&self) -> f64 {
        if self.distinct_operands == 0 {
            0.0
        } else {
            (self.distinct_operators as f64 / 2.0) * (self.total_operands as f64 / self.distinct_operands as f64)
        }
    }

    pub fn effort(&self) -> f64 {
        self.volume() * self.difficulty()
    }
}

pub fn halstead_counts(tree: &SyntaxNode, table: &ClassificationTable) -> HalsteadCounts {
    let mut operators = HashSet::new();
    let mut operands = HashSet::new();
    let mut counts = HalsteadCounts::default();
    for leaf in tree.leaves() {
        match table.role(leaf) {
            Some(Role::Operator) => {
                counts.total_operators += 1;
                operators.insert(leaf.text.as_str());
            }
            Some(Role::Operand) => {
                counts.total_operands += 1;
                operands.insert(leaf.text.as_str());
            }
            None => {}
        }
    }
    counts.distinct_operators = operators.len();
    counts.distinct_operands = operands.len();
    counts
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeMetrics {
    pub sloc: usize,
    pub lloc: usize,
    pub average_cc_file: f64,
    pub num_complexity_blocks: usize,
    pub hal_volume: f64,
    pub hal_difficulty: f64,
    pub hal_effort: f64,
}

impl CodeMetrics {
    pub const NAMES: [&'static str; 7] = [
        "sloc",
        "lloc",
        "average_cc_file",
        "num_complexity_blocks",
        "hal_volume",
        "hal_difficulty",
        "hal_effort",
    ];

    pub fn values(&self) -> [f64; 7] {
        [
            self.sloc as f64,
            self.lloc as f64,
            self.average_cc_file,
            self.num_complexity_blocks as f64,
            self.hal_volume,
            self.hal_difficulty,
            self.hal_effort,
        ]
    }
}

fn parse_or_metric_error(file: &str, text: &str) -> Result<SyntaxNode> {
    parse_file(text).map_err(|e| Error::Metric {
        file: file.to_string(),
        line: e.line,
        col: e.col,
        msg: e.msg,
    })
}

/// Physical lines holding at least one token.
pub fn source_lines(text: &str) -> std::result::Result<usize, super::lexer::LexError> {
    let mut lines = HashSet::new();
    for t in tokenize(text)? {
        lines.extend(t.line..=t.end_line);
    }
    Ok(lines.len())
}

/// Items plus statements.
pub fn logical_lines(tree: &SyntaxNode) -> usize {
    let mut count = 0;
    tree.walk(&mut |n, _| {
        if n.kind.is_item() || n.kind.is_statement() {
            count += 1;
        }
    });
    count
}

/// Cyclomatic complexity of every function, in source order. Nested
/// functions are scored on their own and do not add to their parent.
pub fn function_complexities(tree: &SyntaxNode, table: &ClassificationTable) -> Vec<usize> {
    let enabled: HashSet<DecisionPoint> = table.decision_points().iter().copied().collect();
    let mut out = Vec::new();
    collect_functions(tree, &enabled, &mut out);
    out
}

fn collect_functions(node: &SyntaxNode, enabled: &HashSet<DecisionPoint>, out: &mut Vec<usize>) {
    if node.kind == NodeKind::Fn {
        let slot = out.len();
        out.push(1);
        let mut nested = Vec::new();
        let decisions: usize = node.children.iter().map(|c| decisions_in(c, enabled, &mut nested)).sum();
        out[slot] += decisions;
        for f in nested {
            collect_functions(f, enabled, out);
        }
    } else {
        for child in &node.children {
            collect_functions(child, enabled, out);
        }
    }
}

fn decisions_in<'a>(node: &'a SyntaxNode, enabled: &HashSet<DecisionPoint>, nested: &mut Vec<&'a SyntaxNode>) -> usize {
    if node.kind == NodeKind::Fn {
        nested.push(node);
        return 0;
    }
    let on = |d| enabled.contains(&d);
    let own = match node.kind {
        NodeKind::If if on(DecisionPoint::If) => 1,
        NodeKind::While if on(DecisionPoint::While) => 1,
        NodeKind::For if on(DecisionPoint::For) => 1,
        NodeKind::Loop if on(DecisionPoint::Loop) => 1,
        NodeKind::Guard if on(DecisionPoint::MatchGuard) => 1,
        NodeKind::Try if on(DecisionPoint::Try) => 1,
        NodeKind::Match if on(DecisionPoint::MatchArm) => {
            let arms = node.children.iter().filter(|c| c.kind == NodeKind::Arm).count();
            arms.saturating_sub(1)
        }
        NodeKind::Binary => {
            let op = &node.children[1];
            usize::from((op.is_symbol("&&") && on(DecisionPoint::And)) || (op.is_symbol("||") && on(DecisionPoint::Or)))
        }
        _ => 0,
    };
    own + node.children.iter().map(|c| decisions_in(c, enabled, nested)).sum::<usize>()
}

pub fn analyze_source(file: &str, text: &str) -> Result<CodeMetrics> {
    analyze_source_with(file, text, ClassificationTable::bundled())
}

pub fn analyze_source_with(file: &str, text: &str, table: &ClassificationTable) -> Result<CodeMetrics> {
    let tree = parse_or_metric_error(file, text)?;
    let sloc = source_lines(text).map_err(|e| Error::Metric {
        file: file.to_string(),
        line: e.line,
        col: e.col,
        msg: e.msg,
    })?;
    let cc = function_complexities(&tree, table);
    let average_cc_file = if cc.is_empty() {
        0.0
    } else {
        cc.iter().sum::<usize>() as f64 / cc.len() as f64
    };
    let h = halstead_counts(&tree, table);
    Ok(CodeMetrics {
        sloc,
        lloc: logical_lines(&tree),
        average_cc_file,
        num_complexity_blocks: cc.len(),
        hal_volume: h.volume(),
        hal_difficulty: h.difficulty(),
        hal_effort: h.effort(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AstGraphMetrics {
    pub ast_node_count: usize,
    pub ast_edge_count: usize,
    pub ast_avg_degree: f64,
    pub ast_max_degree: f64,
    pub ast_transitivity: f64,
    pub ast_avg_clustering: f64,
    pub ast_depth: usize,
}

impl AstGraphMetrics {
    pub const NAMES: [&'static str; 7] = [
        "ast_node_count",
        "ast_edge_count",
        "ast_avg_degree",
        "ast_max_degree",
        "ast_transitivity",
        "ast_avg_clustering",
        "ast_depth",
    ];

    pub fn values(&self) -> [f64; 7] {
        [
            self.ast_node_count as f64,
            self.ast_edge_count as f64,
            self.ast_avg_degree,
            self.ast_max_degree,
            self.ast_transitivity,
            self.ast_avg_clustering,
            self.ast_depth as f64,
        ]
    }

    /// Metrics of a rooted tree given each node's parent (`None` for roots).
    pub fn from_parents(parents: &[Option<usize>]) -> Self {
        let edges: Vec<(usize, usize)> = parents
            .iter()
            .enumerate()
            .filter_map(|(child, p)| p.map(|p| (p, child)))
            .collect();
        let mut depth = vec![0usize; parents.len()];
        // parents precede children in pre-order numbering
        for (child, p) in parents.iter().enumerate() {
            if let Some(p) = p {
                depth[child] = depth[*p] + 1;
            }
        }
        let g = UndirectedStats::new(parents.len(), &edges);
        AstGraphMetrics {
            ast_node_count: parents.len(),
            ast_edge_count: edges.len(),
            ast_avg_degree: g.avg_degree,
            ast_max_degree: g.max_degree,
            ast_transitivity: g.transitivity,
            ast_avg_clustering: g.avg_clustering,
            ast_depth: depth.into_iter().max().unwrap_or(0),
        }
    }
}

/// Degree and clustering statistics of an undirected simple graph.
#[derive(Debug, Clone, PartialEq)]
pub struct UndirectedStats {
    pub avg_degree: f64,
    pub max_degree: f64,
    /// `3 * triangles / connected triples`.
    pub transitivity: f64,
    /// Mean local clustering coefficient; nodes of degree < 2 contribute 0.
    pub avg_clustering: f64,
}

impl UndirectedStats {
    /// Self-loops and duplicate edges are ignored.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adjacency: Vec<HashSet<usize>> = vec![HashSet::new(); n];
        for &(a, b) in edges {
            if a != b {
                adjacency[a].insert(b);
                adjacency[b].insert(a);
            }
        }
        let degrees: Vec<usize> = adjacency.iter().map(HashSet::len).collect();
        let mut triangle_sum = 0usize;
        let mut triple_sum = 0usize;
        let mut clustering_sum = 0.0;
        for (v, neighbors) in adjacency.iter().enumerate() {
            let d = degrees[v];
            if d < 2 {
                continue;
            }
            let ns: Vec<usize> = neighbors.iter().copied().collect();
            let mut links = 0;
            for (i, &a) in ns.iter().enumerate() {
                for &b in &ns[i + 1..] {
                    if adjacency[a].contains(&b) {
                        links += 1;
                    }
                }
            }
            let pairs = d * (d - 1) / 2;
            triangle_sum += links;
            triple_sum += pairs;
            clustering_sum += links as f64 / pairs as f64;
        }
        let nf = n.max(1) as f64;
        UndirectedStats {
            avg_degree: if n == 0 { 0.0 } else { degrees.iter().sum::<usize>() as f64 / nf },
            max_degree: degrees.iter().copied().max().unwrap_or(0) as f64,
            transitivity: if triple_sum == 0 {
                0.0
            } else {
                triangle_sum as f64 / triple_sum as f64
            },
            avg_clustering: if n == 0 { 0.0 } else { clustering_sum / nf },
        }
    }
}

/// Pre-order parent list of a syntax tree.
pub fn tree_parents(tree: &SyntaxNode) -> Vec<Option<usize>> {
    let mut parents = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    tree.walk(&mut |_, depth| {
        stack.truncate(depth);
        parents.push(stack.last().copied());
        stack.push(parents.len() - 1);
    });
    parents
}

pub fn build_ast_graph(file: &str, text: &str) -> Result<AstGraphMetrics> {
    let tree = parse_or_metric_error(file, text)?;
    Ok(AstGraphMetrics::from_parents(&tree_parents(&tree)))
}

/// Code and graph metrics for every (name, source) pair, keyed by name.
pub fn analyze_all(sources: &[(&str, &str)]) -> Result<HashMap<String, (CodeMetrics, AstGraphMetrics)>> {
    use rayon::prelude::*;
    sources
        .par_iter()
        .map(|&(name, text)| Ok((name.to_string(), (analyze_source(name, text)?, build_ast_graph(name, text)?))))
        .collect()
}
