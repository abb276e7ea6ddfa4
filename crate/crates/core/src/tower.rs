//! Nested sequences of metric graphs standing in for noncompact spaces:
//! per-level translation lengths, slipping elements, the universal
//! slipping group, and what those imply for the universal delta cover.
//!
//! Consecutive levels are connected by a homomorphism on fundamental
//! groups, either induced by an isometric graph embedding or given
//! directly as generator rewrite rules. Verdicts about the infinite
//! object are three-valued: a `No` means "not within the levels given",
//! which for rewrite towers can be the truncation talking — the
//! delta-schedule construction accounts for that by not probing below
//! what the deepest level resolves while its short geometry is still
//! shrinking.

use crate::cycles::{enumerate_shift_classes, SearchBudgets};
use crate::graph::{GraphError, MetricGraph};
use crate::group::{normal_closure_member, Verdict};
use crate::spectrum::sequence_limit_estimate;
use crate::value::{Value, NUMERIC_EPS};
use crate::word::Word;
use thiserror::Error;

/// Default number of halvings in a delta schedule.
pub const DEFAULT_SCHEDULE_STEPS: usize = 20;

#[derive(Debug, Error)]
pub enum TowerError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("level {level}: {source}")]
    Graph {
        level: usize,
        #[source]
        source: GraphError,
    },
    #[error("level {level} map: {msg}")]
    Map { level: usize, msg: String },
}

/// A group element seen at one level of a tower.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerElement {
    pub level: usize,
    pub word: Word,
}

/// Levels of growing metric graphs with a homomorphism between
/// consecutive fundamental groups.
#[derive(Clone, Debug)]
pub struct GraphTower {
    levels: Vec<MetricGraph>,
    /// `maps[n][g]` = image of level-`n` generator `g` over level-`n+1`
    /// generators.
    maps: Vec<Vec<Word>>,
    /// Named elements that reports classify.
    tracked: Vec<(String, TowerElement)>,
}

impl GraphTower {
    /// Tower from explicit rewrite maps; any assignment of generators to
    /// words is a valid homomorphism of free groups, so only shapes are
    /// checked.
    pub fn from_expansions(
        levels: Vec<MetricGraph>,
        maps: Vec<Vec<Word>>,
    ) -> Result<GraphTower, TowerError> {
        if levels.is_empty() {
            return Err(TowerError::Map { level: 0, msg: "tower needs at least one level".into() });
        }
        if maps.len() + 1 != levels.len() {
            return Err(TowerError::Map {
                level: maps.len(),
                msg: format!("{} levels need {} maps, got {}", levels.len(), levels.len() - 1, maps.len()),
            });
        }
        for (n, map) in maps.iter().enumerate() {
            if map.len() != levels[n].rank() {
                return Err(TowerError::Map {
                    level: n,
                    msg: format!("map covers {} generators, level has {}", map.len(), levels[n].rank()),
                });
            }
            for (g, image) in map.iter().enumerate() {
                if image.letters().iter().any(|l| l.gen as usize >= levels[n + 1].rank()) {
                    return Err(TowerError::Map {
                        level: n,
                        msg: format!("image of generator {g} uses generators beyond the next level"),
                    });
                }
            }
        }
        let tracked = default_tracked(&levels);
        Ok(GraphTower { levels, maps, tracked })
    }

    /// Tower from isometric embeddings: `vertex_maps[n]` sends level-`n`
    /// vertex names into level `n+1`. Every edge must reappear under the
    /// same name with mapped endpoints and equal length, and basepoints
    /// must correspond; the connecting homomorphism is then the one the
    /// inclusion induces.
    pub fn from_embeddings(
        levels: Vec<MetricGraph>,
        vertex_maps: &[Vec<(String, String)>],
    ) -> Result<GraphTower, TowerError> {
        if levels.is_empty() {
            return Err(TowerError::Map { level: 0, msg: "tower needs at least one level".into() });
        }
        if vertex_maps.len() + 1 != levels.len() {
            return Err(TowerError::Map {
                level: vertex_maps.len(),
                msg: "one vertex map per consecutive pair of levels".into(),
            });
        }
        let mut maps = Vec::with_capacity(vertex_maps.len());
        for (n, vm) in vertex_maps.iter().enumerate() {
            let images = induced_images(&levels[n], &levels[n + 1], vm)
                .map_err(|msg| TowerError::Map { level: n + 1, msg })?;
            maps.push(images);
        }
        let tracked = default_tracked(&levels);
        Ok(GraphTower { levels, maps, tracked })
    }

    /// Tower file: a `tower` header, then `level` blocks in graph format,
    /// each later block optionally carrying `embed <prev> <this>` vertex
    /// lines and `expand <gen> = <word>` rewrite lines referring back to
    /// the previous level.
    pub fn parse(text: &str) -> Result<GraphTower, TowerError> {
        struct Block {
            graph_lines: Vec<String>,
            embeds: Vec<(usize, String, String)>,
            expands: Vec<(usize, String, String)>,
        }
        let mut blocks: Vec<Block> = Vec::new();
        let mut seen_header = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if !seen_header {
                if content != "tower" {
                    return Err(TowerError::Parse { line, msg: "expected `tower` header".into() });
                }
                seen_header = true;
                continue;
            }
            if content == "level" {
                blocks.push(Block { graph_lines: Vec::new(), embeds: Vec::new(), expands: Vec::new() });
                continue;
            }
            let Some(block) = blocks.last_mut() else {
                return Err(TowerError::Parse { line, msg: "content before first `level`".into() });
            };
            if let Some(rest) = content.strip_prefix("embed ") {
                let mut it = rest.split_whitespace();
                let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
                    return Err(TowerError::Parse {
                        line,
                        msg: "embed takes two vertex names".into(),
                    });
                };
                block.embeds.push((line, a.to_string(), b.to_string()));
            } else if let Some(rest) = content.strip_prefix("expand ") {
                let Some((lhs, rhs)) = rest.split_once('=') else {
                    return Err(TowerError::Parse {
                        line,
                        msg: "expand needs `generator = word`".into(),
                    });
                };
                block.expands.push((line, lhs.trim().to_string(), rhs.trim().to_string()));
            } else {
                block.graph_lines.push(content.to_string());
            }
        }
        if blocks.is_empty() {
            return Err(TowerError::Parse { line: 0, msg: "no levels".into() });
        }
        if !blocks[0].embeds.is_empty() || !blocks[0].expands.is_empty() {
            return Err(TowerError::Parse {
                line: 0,
                msg: "first level cannot carry embed/expand lines".into(),
            });
        }
        let mut levels = Vec::with_capacity(blocks.len());
        for (n, block) in blocks.iter().enumerate() {
            let graph = MetricGraph::parse(&block.graph_lines.join("\n"))
                .map_err(|source| TowerError::Graph { level: n, source })?;
            levels.push(graph);
        }
        let mut maps = Vec::with_capacity(blocks.len() - 1);
        for (n, block) in blocks.iter().enumerate().skip(1) {
            let prev = &levels[n - 1];
            let this = &levels[n];
            let mut images: Vec<Option<Word>> = vec![None; prev.rank()];
            if !block.embeds.is_empty() {
                let vm: Vec<(String, String)> =
                    block.embeds.iter().map(|(_, a, b)| (a.clone(), b.clone())).collect();
                let induced = induced_images(prev, this, &vm)
                    .map_err(|msg| TowerError::Map { level: n, msg })?;
                for (g, w) in induced.into_iter().enumerate() {
                    images[g] = Some(w);
                }
            }
            for (line, name, rhs) in &block.expands {
                let Some(g) = prev.resolve_gen(name) else {
                    return Err(TowerError::Parse {
                        line: *line,
                        msg: format!("`{name}` is not a generator of the previous level"),
                    });
                };
                let w = this
                    .parse_group_word(rhs)
                    .map_err(|msg| TowerError::Parse { line: *line, msg })?;
                images[g as usize] = Some(w);
            }
            let mut map = Vec::with_capacity(prev.rank());
            for (g, img) in images.into_iter().enumerate() {
                match img {
                    Some(w) => map.push(w),
                    None => {
                        return Err(TowerError::Map {
                            level: n,
                            msg: format!(
                                "generator `{}` has no embed-induced or expand image",
                                prev.gen_name(g as u32)
                            ),
                        })
                    }
                }
            }
            maps.push(map);
        }
        let tracked = default_tracked(&levels);
        Ok(GraphTower { levels, maps, tracked })
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, n: usize) -> &MetricGraph {
        &self.levels[n]
    }

    pub fn tracked(&self) -> &[(String, TowerElement)] {
        &self.tracked
    }

    pub fn set_tracked(&mut self, tracked: Vec<(String, TowerElement)>) {
        self.tracked = tracked;
    }

    /// Parse a named element at a level.
    pub fn element(&self, level: usize, word: &str) -> Result<TowerElement, String> {
        if level >= self.levels.len() {
            return Err(format!("level {level} out of range"));
        }
        let word = self.levels[level].parse_group_word(word)?;
        Ok(TowerElement { level, word })
    }

    pub fn expand_once(&self, el: &TowerElement) -> Option<TowerElement> {
        if el.level + 1 >= self.levels.len() {
            return None;
        }
        Some(TowerElement {
            level: el.level + 1,
            word: el.word.map_generators(&self.maps[el.level]),
        })
    }

    pub fn expand_to(&self, el: &TowerElement, level: usize) -> Option<TowerElement> {
        if level < el.level || level >= self.levels.len() {
            return None;
        }
        let mut cur = el.clone();
        while cur.level < level {
            cur = self.expand_once(&cur)?;
        }
        Some(cur)
    }
}

fn default_tracked(levels: &[MetricGraph]) -> Vec<(String, TowerElement)> {
    (0..levels[0].rank())
        .map(|g| {
            (
                levels[0].gen_name(g as u32).to_string(),
                TowerElement { level: 0, word: Word::generator(g as u32) },
            )
        })
        .collect()
}

/// Validate an isometric embedding and compute the homomorphism it
/// induces: generator loops map dart-by-dart through same-named edges and
/// collapse against the deeper spanning tree.
fn induced_images(
    prev: &MetricGraph,
    this: &MetricGraph,
    vertex_map: &[(String, String)],
) -> Result<Vec<Word>, String> {
    let mut vmap: Vec<Option<usize>> = vec![None; prev.num_vertices()];
    for (a, b) in vertex_map {
        let u = prev.vertex_index(a).ok_or_else(|| format!("unknown vertex `{a}`"))?;
        let v = this.vertex_index(b).ok_or_else(|| format!("unknown vertex `{b}`"))?;
        if vmap[u].is_some() {
            return Err(format!("vertex `{a}` mapped twice"));
        }
        vmap[u] = Some(v);
    }
    let vmap: Vec<usize> = vmap
        .into_iter()
        .enumerate()
        .map(|(u, v)| v.ok_or_else(|| format!("vertex `{}` has no image", prev.vertex_name(u))))
        .collect::<Result<_, _>>()?;
    let mut seen = vec![false; this.num_vertices()];
    for &v in &vmap {
        if seen[v] {
            return Err(format!("embedding not injective at `{}`", this.vertex_name(v)));
        }
        seen[v] = true;
    }
    if vmap[prev.base()] != this.base() {
        return Err("embedding must preserve the basepoint".into());
    }
    let mut edge_map: Vec<usize> = Vec::with_capacity(prev.num_edges());
    for edge in prev.edges() {
        let te = this
            .edge_index(&edge.name)
            .ok_or_else(|| format!("edge `{}` missing from the next level", edge.name))?;
        let t = &this.edges()[te];
        if (vmap[edge.ends.0], vmap[edge.ends.1]) != t.ends {
            return Err(format!("edge `{}` endpoints do not match its image", edge.name));
        }
        if !edge.length.same_as(&t.length) {
            return Err(format!("edge `{}` changes length across the embedding", edge.name));
        }
        edge_map.push(te);
    }
    let images = (0..prev.rank())
        .map(|g| {
            let path = prev.word_to_path(&Word::generator(g as u32));
            let mapped: Vec<usize> = path.iter().map(|&d| 2 * edge_map[d / 2] + d % 2).collect();
            this.path_to_word(&mapped)
        })
        .collect();
    Ok(images)
}

/// Per-level translation lengths of an element walked down a tower.
#[derive(Clone, Debug)]
pub struct TranslationLengthReport {
    /// `(level, translation length at that level)`.
    pub per_level: Vec<(usize, Value)>,
    pub last: Value,
    /// Whether the tail of the sequence stopped moving (last three values
    /// equal, or all of them for shorter runs).
    pub stabilized: bool,
}

pub fn tower_translation_length(
    t: &GraphTower,
    g: &TowerElement,
    level_budget: usize,
) -> TranslationLengthReport {
    let top = (t.num_levels() - 1).min(g.level + level_budget);
    let mut per_level = Vec::new();
    let mut cur = g.clone();
    loop {
        per_level.push((cur.level, t.level(cur.level).translation_length(&cur.word)));
        if cur.level >= top {
            break;
        }
        cur = t.expand_once(&cur).expect("level below top expands");
    }
    let last = per_level.last().unwrap().1.clone();
    let tail = &per_level[per_level.len().saturating_sub(3)..];
    let stabilized = per_level.len() >= 2 && tail.windows(2).all(|w| w[0].1.same_as(&w[1].1));
    TranslationLengthReport { per_level, last, stabilized }
}

/// Whether the element's translation length drops below `eps` at some
/// level. `No` means "not within the given levels and budget".
pub fn slipping_test(
    t: &GraphTower,
    g: &TowerElement,
    eps: &Value,
    level_budget: usize,
) -> Verdict {
    assert!(eps.to_f64() > 0.0, "eps must be positive");
    let top = (t.num_levels() - 1).min(g.level + level_budget);
    let mut cur = g.clone();
    loop {
        let len = t.level(cur.level).translation_length(&cur.word);
        if len.strictly_below(eps) {
            return Verdict::Yes;
        }
        if cur.level >= top {
            return Verdict::No;
        }
        cur = t.expand_once(&cur).expect("level below top expands");
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniversalSlippingOutcome {
    pub verdict: Verdict,
    /// First level whose short classes generated the element.
    pub witness_level: Option<usize>,
}

/// Whether some level rewrites the element as a product of classes of
/// translation length `< delta` (the subgroup those classes generate is
/// normal, since translation length is conjugation-invariant).
pub fn universal_slipping_test(
    t: &GraphTower,
    g: &TowerElement,
    delta: &Value,
    level_budget: usize,
    budgets: &SearchBudgets,
) -> UniversalSlippingOutcome {
    assert!(delta.to_f64() > 0.0, "delta must be positive");
    if g.word.is_identity() {
        return UniversalSlippingOutcome { verdict: Verdict::Yes, witness_level: Some(g.level) };
    }
    let top = (t.num_levels() - 1).min(g.level + level_budget);
    let mut cur = g.clone();
    let mut undetermined = false;
    loop {
        match short_class_membership(t.level(cur.level), &cur.word, delta, budgets) {
            Verdict::Yes => {
                return UniversalSlippingOutcome {
                    verdict: Verdict::Yes,
                    witness_level: Some(cur.level),
                }
            }
            Verdict::Undetermined => undetermined = true,
            Verdict::No => {}
        }
        if cur.level >= top {
            break;
        }
        cur = t.expand_once(&cur).expect("level below top expands");
    }
    let verdict = if undetermined || top + 1 < t.num_levels() {
        Verdict::Undetermined
    } else {
        Verdict::No
    };
    UniversalSlippingOutcome { verdict, witness_level: None }
}

/// Membership of `word` in the normal closure of the graph's classes of
/// translation length `< delta`.
fn short_class_membership(
    graph: &MetricGraph,
    word: &Word,
    delta: &Value,
    budgets: &SearchBudgets,
) -> Verdict {
    if word.is_identity() {
        return Verdict::Yes;
    }
    // Nothing is short when even the shortest essential loop reaches
    // delta: the closure is trivial, no enumeration needed.
    match graph.shortest_essential_loop() {
        None => return Verdict::No,
        Some(f) if !f.strictly_below(delta) => return Verdict::No,
        _ => {}
    }
    // When every generator is already short the closure is everything.
    let all_short = graph.rank() > 0
        && (0..graph.rank())
            .all(|g| graph.translation_length(&Word::generator(g as u32)).strictly_below(delta));
    if all_short {
        return Verdict::Yes;
    }
    // In a wedge every class is a cyclic word whose length is the sum of
    // its letters' circle lengths, so the classes below delta are
    // generated by the short generators alone — no enumeration.
    let base = graph.base();
    if graph.edges().iter().all(|e| e.ends == (base, base)) {
        let relators: Vec<Word> = (0..graph.rank() as u32)
            .map(Word::generator)
            .filter(|w| graph.translation_length(w).strictly_below(delta))
            .collect();
        return normal_closure_member(word, &relators, graph.rank(), budgets.coset_budget).verdict;
    }
    let enumerated = enumerate_shift_classes(graph, delta, budgets.enum_nodes);
    let relators: Vec<Word> = enumerated
        .classes
        .iter()
        .filter(|c| c.length.strictly_below(delta))
        .map(|c| c.word.clone())
        .collect();
    let verdict = normal_closure_member(word, &relators, graph.rank(), budgets.coset_budget).verdict;
    match verdict {
        Verdict::Yes => Verdict::Yes,
        // A truncated class list can only hide relators, so a refusal is
        // not trustworthy.
        _ if enumerated.truncated => Verdict::Undetermined,
        v => v,
    }
}

/// Geometric delta schedule for probing "for all delta": halvings from the
/// element's own translation length. While the deepest level's shortest
/// class is still shrinking level-over-level, values at or below it are
/// dropped — down there a refusal would only reflect the truncation.
pub fn delta_schedule(
    t: &GraphTower,
    g: &TowerElement,
    steps: usize,
    level_budget: usize,
) -> Vec<Value> {
    let top = (t.num_levels() - 1).min(g.level + level_budget);
    let start = t.level(g.level).translation_length(&g.word);
    if !(start.to_f64() > 0.0) {
        return Vec::new();
    }
    let floor = t.level(top).shortest_essential_loop();
    let shrinking = top >= 1
        && match (&floor, t.level(top - 1).shortest_essential_loop()) {
            (Some(f), Some(prev)) => f.strictly_below(&prev),
            _ => false,
        };
    let mut out = Vec::new();
    let mut delta = start;
    for _ in 0..=steps {
        if shrinking {
            if let Some(f) = &floor {
                if !f.strictly_below(&delta) {
                    break;
                }
            }
        }
        out.push(delta.clone());
        delta = delta.half();
    }
    out
}

/// Probe universal-slipping membership along a whole schedule. Returns the
/// verdict and the delta that refused (on `No`) or could not be decided.
pub fn universal_slipping_membership(
    t: &GraphTower,
    g: &TowerElement,
    schedule: &[Value],
    level_budget: usize,
    budgets: &SearchBudgets,
) -> (Verdict, Option<Value>) {
    if g.word.is_identity() {
        return (Verdict::Yes, None);
    }
    let mut undecided: Option<Value> = None;
    for delta in schedule {
        match universal_slipping_test(t, g, delta, level_budget, budgets).verdict {
            Verdict::Yes => {}
            Verdict::No => return (Verdict::No, Some(delta.clone())),
            Verdict::Undetermined => {
                if undecided.is_none() {
                    undecided = Some(delta.clone());
                }
            }
        }
    }
    match undecided {
        Some(d) => (Verdict::Undetermined, Some(d)),
        None if schedule.is_empty() => (Verdict::Undetermined, None),
        None => (Verdict::Yes, None),
    }
}

/// One tracked element's universal-slipping classification.
#[derive(Clone, Debug)]
pub struct SlipClassification {
    pub name: String,
    pub element: TowerElement,
    pub verdict: Verdict,
    /// The schedule delta that refused or stayed open.
    pub failing_delta: Option<Value>,
}

/// What the universal delta cover is, via the quotient of the universal
/// cover by the universal slipping group.
#[derive(Clone, Debug, PartialEq)]
pub enum CoverConclusion {
    /// Everything slips: the universal delta cover is the space itself.
    SpaceItself,
    /// Nothing slips and the spectrum infimum stays positive: the
    /// universal delta cover is the delta cover at half that infimum.
    DeltaCover { delta0: Value },
    /// Nothing slips but the per-level spectrum infima vanish in the
    /// limit: the universal delta cover is the universal cover and is not
    /// a delta cover.
    UniversalCoverOnly,
    /// Some tracked elements slip and some do not: the universal delta
    /// cover is the proper intermediate quotient by the slipping ones.
    Partial,
    Undetermined,
}

#[derive(Clone, Debug)]
pub struct UniversalDeltaCoverReport {
    pub classifications: Vec<SlipClassification>,
    /// Names whose classification stayed open.
    pub undetermined: Vec<String>,
    /// Smallest covering-spectrum value over the probed levels.
    pub spectrum_infimum: Option<Value>,
    /// Extrapolated limit of the per-level infima with a confidence
    /// radius, when a trend was detectable.
    pub infimum_limit: Option<(f64, f64)>,
    pub conclusion: CoverConclusion,
}

impl UniversalDeltaCoverReport {
    /// Whether the universal delta cover is itself a delta cover.
    pub fn is_delta_cover(&self) -> Verdict {
        match self.conclusion {
            CoverConclusion::SpaceItself | CoverConclusion::DeltaCover { .. } => Verdict::Yes,
            CoverConclusion::UniversalCoverOnly => Verdict::No,
            _ => Verdict::Undetermined,
        }
    }
}

pub fn universal_delta_cover_report(
    t: &GraphTower,
    level_budget: usize,
    budgets: &SearchBudgets,
) -> UniversalDeltaCoverReport {
    let top = (t.num_levels() - 1).min(level_budget);
    // Per-level covering-spectrum infima: the smallest breakpoint is
    // always half the shortest essential loop.
    let infima: Vec<Value> = (0..=top)
        .filter_map(|l| t.level(l).shortest_essential_loop())
        .map(|v| v.half())
        .collect();
    let spectrum_infimum = infima
        .iter()
        .cloned()
        .min_by(|a, b| a.cmp_val(b));
    let infimum_limit = sequence_limit_estimate(&infima.iter().map(|v| v.to_f64()).collect::<Vec<_>>());

    let mut classifications = Vec::new();
    for (name, el) in t.tracked() {
        let schedule = delta_schedule(t, el, DEFAULT_SCHEDULE_STEPS, level_budget);
        let (verdict, failing_delta) =
            universal_slipping_membership(t, el, &schedule, level_budget, budgets);
        classifications.push(SlipClassification {
            name: name.clone(),
            element: el.clone(),
            verdict,
            failing_delta,
        });
    }
    let undetermined: Vec<String> = classifications
        .iter()
        .filter(|c| c.verdict == Verdict::Undetermined)
        .map(|c| c.name.clone())
        .collect();

    let conclusion = if classifications.is_empty() {
        if spectrum_infimum.is_none() {
            // No essential loops anywhere: simply connected, its own cover.
            CoverConclusion::SpaceItself
        } else {
            CoverConclusion::Undetermined
        }
    } else if !undetermined.is_empty() {
        CoverConclusion::Undetermined
    } else {
        let yes = classifications.iter().filter(|c| c.verdict == Verdict::Yes).count();
        let no = classifications.len() - yes;
        if no == 0 && yes > 0 {
            CoverConclusion::SpaceItself
        } else if yes == 0 && no > 0 {
            match &spectrum_infimum {
                None => CoverConclusion::Undetermined,
                Some(inf) => positive_infimum_conclusion(&infima, inf, infimum_limit),
            }
        } else {
            CoverConclusion::Partial
        }
    };
    UniversalDeltaCoverReport {
        classifications,
        undetermined,
        spectrum_infimum,
        infimum_limit,
        conclusion,
    }
}

/// Decide whether level infima stay positive (stabilized tail or a
/// positive extrapolated limit) or vanish.
fn positive_infimum_conclusion(
    infima: &[Value],
    at_budget: &Value,
    limit: Option<(f64, f64)>,
) -> CoverConclusion {
    let n = infima.len();
    let stabilized = n >= 2 && infima[n - 1].same_as(&infima[n - 2]);
    if stabilized {
        return CoverConclusion::DeltaCover { delta0: at_budget.half() };
    }
    match limit {
        Some((l, conf)) => {
            let margin = 3.0 * conf.max(NUMERIC_EPS);
            if l > margin {
                CoverConclusion::DeltaCover { delta0: at_budget.half() }
            } else if l.abs() <= margin {
                CoverConclusion::UniversalCoverOnly
            } else {
                CoverConclusion::Undetermined
            }
        }
        None => CoverConclusion::Undetermined,
    }
}

/// Membership in the free factor spanned by whole generator families:
/// whether the word uses only the listed generators. This is how products
/// of independent slipping families are classified into the slipping
/// group even when the products themselves do not slip.
pub fn free_factor_member(w: &Word, gens: &[u32]) -> bool {
    w.letters().iter().all(|l| gens.contains(&l.gen))
}

/// How many of a tower's levels carry tracked elements: everything born
/// strictly above the deepest level. An element born at the boundary can
/// only be probed above its own length, which decides nothing.
fn tracked_levels(levels: usize) -> usize {
    if levels >= 2 {
        levels - 1
    } else {
        levels
    }
}

/// The binary pants tower: level `k` is a wedge of `2^(k+1)` circles of
/// circumference `2π/2^(k+1)`, and each circle splits into the product of
/// the two below it. Tracked elements are the first circle of each level
/// above the deepest, whose translation length stays exactly `2π/2^(k+1)`
/// all the way down.
pub fn pants_tower(levels: usize) -> GraphTower {
    assert!((1..=20).contains(&levels), "pants tower supports 1..=20 levels");
    let mut graphs = Vec::with_capacity(levels);
    let mut maps = Vec::with_capacity(levels - 1);
    for k in 0..levels {
        let count = 1usize << (k + 1);
        let circumference = Value::pi_times(1, 1 << k);
        graphs.push(MetricGraph::wedge_of_circles(&vec![circumference; count]));
        if k + 1 < levels {
            let map = (0..count as u32)
                .map(|g| Word::generator(2 * g).concat(&Word::generator(2 * g + 1)))
                .collect();
            maps.push(map);
        }
    }
    let mut tower = GraphTower::from_expansions(graphs, maps).expect("preset is well formed");
    let tracked = (1..=tracked_levels(levels))
        .map(|i| {
            (format!("g_{{{i},1}}"), TowerElement { level: i - 1, word: Word::generator(0) })
        })
        .collect();
    tower.set_tracked(tracked);
    tower
}

/// The growing wedge: level `k` holds circles of circumference
/// `2π(1 + 1/j)` for `j = 1..=k+1`, each level including the previous.
pub fn wedge_tower(levels: usize) -> GraphTower {
    assert!(levels >= 1);
    let circ = |j: usize| Value::pi_times(2 * (j as i64 + 1), j as i64);
    let mut graphs = Vec::with_capacity(levels);
    let mut maps = Vec::with_capacity(levels.saturating_sub(1));
    for k in 0..levels {
        let circs: Vec<Value> = (1..=k + 1).map(circ).collect();
        graphs.push(MetricGraph::wedge_of_circles(&circs));
        if k + 1 < levels {
            maps.push((0..=k as u32).map(Word::generator).collect());
        }
    }
    let mut tower = GraphTower::from_expansions(graphs, maps).expect("preset is well formed");
    let tracked = (1..=tracked_levels(levels))
        .map(|j| (format!("g_{j}"), TowerElement { level: j - 1, word: Word::generator(j as u32 - 1) }))
        .collect();
    tower.set_tracked(tracked);
    tower
}

/// A surface of infinite genus with holes shrinking toward infinity,
/// modeled by its dual wedge of shrinking circles: level `k` holds
/// circles of circumference `1/j` for `j = 1..=k+1`.
pub fn shrinking_circles_tower(levels: usize) -> GraphTower {
    assert!(levels >= 1);
    let mut graphs = Vec::with_capacity(levels);
    let mut maps = Vec::with_capacity(levels.saturating_sub(1));
    for k in 0..levels {
        let circs: Vec<Value> = (1..=k + 1).map(|j| Value::from_rational(1, j as i64)).collect();
        graphs.push(MetricGraph::wedge_of_circles(&circs));
        if k + 1 < levels {
            maps.push((0..=k as u32).map(Word::generator).collect());
        }
    }
    let mut tower = GraphTower::from_expansions(graphs, maps).expect("preset is well formed");
    let tracked = (1..=tracked_levels(levels))
        .map(|j| (format!("g_{j}"), TowerElement { level: j - 1, word: Word::generator(j as u32 - 1) }))
        .collect();
    tower.set_tracked(tracked);
    tower
}

#[cfg(test)]
mod tests {
    use super::*;

    fn budgets() -> SearchBudgets {
        SearchBudgets::default()
    }

    fn constant_tower(g: MetricGraph, levels: usize) -> GraphTower {
        let maps = vec![(0..g.rank() as u32).map(Word::generator).collect(); levels - 1];
        GraphTower::from_expansions(vec![g; levels], maps).unwrap()
    }

    #[test]
    fn pants_lengths_exact_at_every_level() {
        let t = pants_tower(6);
        for i in 1..=4usize {
            let (_, el) = &t.tracked()[i - 1];
            let report = tower_translation_length(&t, el, 10);
            let expected = Value::pi_times(2, 1 << i);
            for (_, len) in &report.per_level {
                assert!(len.same_as(&expected), "level length {len:?} vs {expected:?}");
                assert!(len.is_exact());
            }
            assert!(report.stabilized);
        }
    }

    #[test]
    fn pants_expansion_is_consecutive_blocks() {
        let t = pants_tower(4);
        let el = TowerElement { level: 0, word: Word::generator(0) };
        let deep = t.expand_to(&el, 2).unwrap();
        let gens: Vec<u32> = deep.word.letters().iter().map(|l| l.gen).collect();
        assert_eq!(gens, vec![0, 1, 2, 3]);
        assert!(deep.word.letters().iter().all(|l| !l.inverse));
    }

    #[test]
    fn pants_universal_slipping_with_witness() {
        let t = pants_tower(12);
        let el = TowerElement { level: 0, word: Word::generator(0) };
        let delta = Value::pi_times(2, 1 << 10);
        let out = universal_slipping_test(&t, &el, &delta, 20, &budgets());
        assert_eq!(out.verdict, Verdict::Yes);
        // Ten expansions: the first level whose circles are strictly
        // shorter than 2π/2^10.
        assert_eq!(out.witness_level, Some(10));
    }

    #[test]
    fn pants_does_not_slip_directly() {
        let t = pants_tower(10);
        let el = TowerElement { level: 0, word: Word::generator(0) };
        assert_eq!(slipping_test(&t, &el, &Value::from_rational(1, 100), 20), Verdict::No);
    }

    #[test]
    fn pants_report_space_itself() {
        let t = pants_tower(10);
        let report = universal_delta_cover_report(&t, 20, &budgets());
        assert!(report.classifications.iter().all(|c| c.verdict == Verdict::Yes));
        assert_eq!(report.conclusion, CoverConclusion::SpaceItself);
        assert_eq!(report.is_delta_cover(), Verdict::Yes);
    }

    #[test]
    fn wedge_lengths_constant_and_no_membership() {
        let t = wedge_tower(20);
        let (_, g3) = &t.tracked()[2];
        let report = tower_translation_length(&t, g3, 30);
        let expected = Value::pi_times(8, 3);
        assert!(report.per_level.iter().all(|(_, v)| v.same_as(&expected)));
        assert!(report.stabilized);
        let out = universal_slipping_test(&t, g3, &Value::pi_times(1, 1), 30, &budgets());
        assert_eq!(out.verdict, Verdict::No);
    }

    #[test]
    fn wedge_report_delta_cover_at_half_infimum() {
        let t = wedge_tower(12);
        let report = universal_delta_cover_report(&t, 20, &budgets());
        assert!(report.classifications.iter().all(|c| c.verdict == Verdict::No));
        assert!(report.spectrum_infimum.as_ref().unwrap().same_as(&Value::pi_times(13, 12)));
        match &report.conclusion {
            CoverConclusion::DeltaCover { delta0 } => {
                assert!(delta0.same_as(&Value::pi_times(13, 24)));
            }
            other => panic!("expected delta cover, got {other:?}"),
        }
    }

    #[test]
    fn shrinking_holes_report_universal_cover_only() {
        let t = shrinking_circles_tower(24);
        let report = universal_delta_cover_report(&t, 30, &budgets());
        assert!(report.classifications.iter().all(|c| c.verdict == Verdict::No));
        assert_eq!(report.conclusion, CoverConclusion::UniversalCoverOnly);
        assert_eq!(report.is_delta_cover(), Verdict::No);
    }

    #[test]
    fn single_shrinking_circle_slips() {
        let levels: Vec<MetricGraph> = (1..=30)
            .map(|n| MetricGraph::circle(Value::from_rational(1, n)))
            .collect();
        let maps = vec![vec![Word::generator(0)]; 29];
        let t = GraphTower::from_expansions(levels, maps).unwrap();
        let el = TowerElement { level: 0, word: Word::generator(0) };
        assert_eq!(slipping_test(&t, &el, &Value::from_rational(1, 25), 40), Verdict::Yes);
        // Slipping implies universal slipping at each delta probed.
        for k in 0..5 {
            let delta = Value::from_rational(1, 1 << k);
            let out = universal_slipping_test(&t, &el, &delta, 40, &budgets());
            assert_eq!(out.verdict, Verdict::Yes, "delta index {k}");
        }
    }

    #[test]
    fn constant_figure_eight_report() {
        let g = MetricGraph::wedge_of_circles(&[Value::from_int(1), Value::from_int(1)]);
        let t = constant_tower(g, 5);
        let report = universal_delta_cover_report(&t, 10, &budgets());
        assert!(report.classifications.iter().all(|c| c.verdict == Verdict::No));
        match &report.conclusion {
            CoverConclusion::DeltaCover { delta0 } => {
                assert!(delta0.same_as(&Value::from_rational(1, 4)));
            }
            other => panic!("expected delta cover, got {other:?}"),
        }
    }

    #[test]
    fn lengths_nonincreasing_down_presets() {
        for t in [pants_tower(8), wedge_tower(10), shrinking_circles_tower(10)] {
            for (_, el) in t.tracked() {
                let report = tower_translation_length(&t, el, 20);
                for w in report.per_level.windows(2) {
                    assert!(w[1].1.cmp_val(&w[0].1) != std::cmp::Ordering::Greater);
                }
            }
        }
    }

    #[test]
    fn coarser_probes_never_change_the_verdict() {
        // The delta filtration is nested, so the doubled-start schedule —
        // the same halvings begun one doubling higher — probes a superset
        // of deltas and must reach the same verdict.
        let pants = pants_tower(8);
        let wedge = wedge_tower(8);
        for (t, el) in [(&pants, &pants.tracked()[1].1), (&wedge, &wedge.tracked()[1].1)] {
            let schedule = delta_schedule(t, el, DEFAULT_SCHEDULE_STEPS, 12);
            assert!(!schedule.is_empty());
            let mut widened = vec![schedule[0].add(&schedule[0])];
            widened.extend(schedule.iter().cloned());
            let (v1, _) = universal_slipping_membership(t, el, &schedule, 12, &budgets());
            let (v2, _) = universal_slipping_membership(t, el, &widened, 12, &budgets());
            assert_eq!(v1, v2);
        }
    }

    #[test]
    fn slipping_set_not_closed_but_generation_is_consistent() {
        // Two independent slipping families a^n, b^n with mixed products
        // bounded below: the direct slipping oracle rejects a*b, yet the
        // group generated by the slipping set contains it.
        let a = Word::generator(0);
        let b = Word::generator(1);
        let ab = a.concat(&b);
        let direct_slip = |w: &Word| w.support().len() == 1;
        assert!(direct_slip(&a.pow(5)));
        assert!(direct_slip(&b.pow(-3)));
        assert!(!direct_slip(&ab));
        let slip_gens = [0u32, 1u32];
        assert!(free_factor_member(&ab, &slip_gens));
        // Everything directly slipping is also in the generated group.
        for w in [a.pow(5), b.pow(-3), a.clone()] {
            assert!(!direct_slip(&w) || free_factor_member(&w, &slip_gens));
        }
    }

    #[test]
    fn parse_embedding_tower() {
        let text = "\
tower
level
v o
e c1 o o 2
base o
level
v o
e c1 o o 2
e c2 o o 3
base o
embed o o
";
        let t = GraphTower::parse(text).unwrap();
        assert_eq!(t.num_levels(), 2);
        let el = t.element(0, "c1").unwrap();
        let deep = t.expand_to(&el, 1).unwrap();
        assert_eq!(deep.word, Word::generator(t.level(1).resolve_gen("c1").unwrap()));
        assert!(t
            .level(1)
            .translation_length(&deep.word)
            .same_as(&Value::from_int(2)));
    }

    #[test]
    fn parse_expansion_tower() {
        let text = "\
tower
level
v o
e c1 o o 2
base o
level
v o
e d1 o o 1
e d2 o o 1
base o
expand c1 = d1 d2
";
        let t = GraphTower::parse(text).unwrap();
        let el = t.element(0, "c1").unwrap();
        let deep = t.expand_once(&el).unwrap();
        assert_eq!(t.level(1).display_word(&deep.word), "d1 d2");
    }

    #[test]
    fn parse_rejects_unmapped_generator() {
        let text = "\
tower
level
v o
e c1 o o 2
base o
level
v o
e d1 o o 1
base o
";
        match GraphTower::parse(text) {
            Err(TowerError::Map { level: 1, .. }) => {}
            other => panic!("expected map error, got {other:?}"),
        }
    }

    #[test]
    fn embedding_must_preserve_lengths() {
        let text = "\
tower
level
v o
e c1 o o 2
base o
level
v o
e c1 o o 3
base o
embed o o
";
        assert!(GraphTower::parse(text).is_err());
    }

    #[test]
    fn shortest_loop_matches_enumeration() {
        let graphs = [
            MetricGraph::wedge_of_circles(&[Value::from_int(3), Value::from_int(2)]),
            MetricGraph::parse(
                "v a\nv b\ne p a a 1\ne q a b 2\ne r a b 3\nbase a",
            )
            .unwrap(),
        ];
        for g in &graphs {
            let horizon = Value::from_int(20);
            let enumerated = enumerate_shift_classes(g, &horizon, 1_000_000);
            let min_class = enumerated
                .classes
                .iter()
                .map(|c| c.length.clone())
                .min_by(|a, b| a.cmp_val(b))
                .unwrap();
            assert!(g.shortest_essential_loop().unwrap().same_as(&min_class));
        }
    }
}
