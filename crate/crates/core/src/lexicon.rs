//! Word nodes, the lexicon, stage-1 node selection and semantic priming.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::seq::index;
use rand::Rng;

use crate::assocnet::{check_fraction, ComponentNetwork};
use crate::error::{Error, Result};
use crate::fraction_count;
use crate::pattern::{BipolarPattern, SlotMap};

/// One of the three networks of a word node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Component {
    Semantic,
    Lexical,
    Phonological,
}

impl Component {
    /// Cascade order.
    pub const ALL: [Component; 3] = [
        Component::Semantic,
        Component::Lexical,
        Component::Phonological,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Component::Semantic => "semantic",
            Component::Lexical => "lexical",
            Component::Phonological => "phonological",
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Component {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Component::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Configuration(format!("unknown component {s:?}")))
    }
}

/// A value for each component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct PerComponent<T> {
    pub semantic: T,
    pub lexical: T,
    pub phonological: T,
}

impl<T: Clone> PerComponent<T> {
    pub fn uniform(value: T) -> Self {
        Self {
            semantic: value.clone(),
            lexical: value.clone(),
            phonological: value,
        }
    }
}

impl<T> PerComponent<T> {
    pub fn get(&self, c: Component) -> &T {
        match c {
            Component::Semantic => &self.semantic,
            Component::Lexical => &self.lexical,
            Component::Phonological => &self.phonological,
        }
    }

    pub fn get_mut(&mut self, c: Component) -> &mut T {
        match c {
            Component::Semantic => &mut self.semantic,
            Component::Lexical => &mut self.lexical,
            Component::Phonological => &mut self.phonological,
        }
    }

    pub fn map<U>(self, mut f: impl FnMut(T) -> U) -> PerComponent<U> {
        PerComponent {
            semantic: f(self.semantic),
            lexical: f(self.lexical),
            phonological: f(self.phonological),
        }
    }
}

/// Three linked component networks plus the patterns they were taught and
/// the comparator's metamemory references.
#[derive(Debug, Clone, PartialEq)]
pub struct WordNode {
    id: String,
    frequency: f64,
    networks: PerComponent<ComponentNetwork>,
    truth: PerComponent<BipolarPattern>,
    metamemory_ref: PerComponent<BipolarPattern>,
    protected: PerComponent<Vec<usize>>,
    slot_map: SlotMap,
}

impl WordNode {
    /// Trains each component on its truth pattern followed by any `extra`
    /// patterns. The metamemory references start equal to the truth.
    pub fn new(
        id: impl Into<String>,
        frequency: f64,
        truth: PerComponent<BipolarPattern>,
        extra: PerComponent<Vec<BipolarPattern>>,
        slot_map: SlotMap,
    ) -> Result<Self> {
        if frequency.is_nan() || frequency < 0.0 {
            return Err(Error::Parameter {
                name: "frequency",
                value: frequency,
            });
        }
        if slot_map.len() != truth.phonological.len() {
            return Err(Error::Dimension {
                expected: truth.phonological.len(),
                found: slot_map.len(),
            });
        }
        let train = |c: Component| {
            let mut pats = alloc::vec![truth.get(c).clone()];
            pats.extend(extra.get(c).iter().cloned());
            ComponentNetwork::train(&pats)
        };
        let networks = PerComponent {
            semantic: train(Component::Semantic)?,
            lexical: train(Component::Lexical)?,
            phonological: train(Component::Phonological)?,
        };
        Ok(Self {
            id: id.into(),
            frequency,
            networks,
            metamemory_ref: truth.clone(),
            truth,
            protected: PerComponent::default(),
            slot_map,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    pub fn network(&self, c: Component) -> &ComponentNetwork {
        self.networks.get(c)
    }

    pub fn truth(&self, c: Component) -> &BipolarPattern {
        self.truth.get(c)
    }

    pub fn metamemory_ref(&self, c: Component) -> &BipolarPattern {
        self.metamemory_ref.get(c)
    }

    /// Units whose mutual weights survive damage and which masking spares.
    pub fn protected(&self, c: Component) -> &[usize] {
        self.protected.get(c)
    }

    pub fn slot_map(&self) -> &SlotMap {
        &self.slot_map
    }

    pub fn set_metamemory_ref(&mut self, c: Component, reference: BipolarPattern) -> Result<()> {
        self.truth.get(c).check_len(reference.len())?;
        *self.metamemory_ref.get_mut(c) = reference;
        Ok(())
    }

    /// Flips `flips` distinct, uniformly chosen units of the reference.
    pub fn corrupt_metamemory<R: Rng + ?Sized>(
        &mut self,
        c: Component,
        flips: usize,
        rng: &mut R,
    ) -> Result<()> {
        let n = self.truth.get(c).len();
        if flips > n {
            return Err(Error::Configuration(format!(
                "cannot flip {flips} units of a {n}-unit {c} reference"
            )));
        }
        let idx = index::sample(rng, n, flips).into_vec();
        let corrupted = self.metamemory_ref.get(c).flipped(&idx)?;
        self.set_metamemory_ref(c, corrupted)
    }

    /// Replaces component `c` with a damaged copy. Weights among the
    /// `protected` units survive and masking later spares those units.
    pub fn damage<R: Rng + ?Sized>(
        &mut self,
        c: Component,
        d: f64,
        protected: &[usize],
        rng: &mut R,
    ) -> Result<()> {
        let damaged = self.networks.get(c).damage_protected(d, protected, rng)?;
        *self.networks.get_mut(c) = damaged;
        *self.protected.get_mut(c) = protected.to_vec();
        Ok(())
    }
}

/// The word nodes and the stage-1 selection threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct Lexicon {
    nodes: Vec<WordNode>,
    selection_threshold: f64,
}

impl Lexicon {
    pub fn new(nodes: Vec<WordNode>, selection_threshold: f64) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::Configuration("lexicon has no words".into()));
        }
        if !(selection_threshold > 0.0 && selection_threshold <= 1.0) {
            return Err(Error::Parameter {
                name: "selection_threshold",
                value: selection_threshold,
            });
        }
        for (i, node) in nodes.iter().enumerate() {
            if nodes[..i].iter().any(|m| m.id == node.id) {
                return Err(Error::Configuration(format!(
                    "duplicate word id {:?}",
                    node.id
                )));
            }
            for c in Component::ALL {
                let expected = nodes[0].truth(c).len();
                if node.truth(c).len() != expected {
                    return Err(Error::Configuration(format!(
                        "word {:?}: {c} length {} differs from {expected}",
                        node.id,
                        node.truth(c).len()
                    )));
                }
            }
        }
        Ok(Self {
            nodes,
            selection_threshold,
        })
    }

    pub fn nodes(&self) -> &[WordNode] {
        &self.nodes
    }

    pub fn node(&self, index: usize) -> &WordNode {
        &self.nodes[index]
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    pub fn get(&self, id: &str) -> Option<&WordNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn get_mut(&mut self, id: &str) -> Option<&mut WordNode> {
        self.nodes.iter_mut().find(|n| n.id == id)
    }

    pub fn selection_threshold(&self) -> f64 {
        self.selection_threshold
    }

    pub fn component_len(&self, c: Component) -> usize {
        self.nodes[0].truth(c).len()
    }

    /// Selection score per node: `max(0, overlap/N) + bonus`, capped at 1.
    pub fn scores(&self, priming: &PrimingState, input: &BipolarPattern) -> Result<Vec<f64>> {
        let n = self.component_len(Component::Semantic);
        if input.len() != n {
            return Err(Error::Dimension {
                expected: n,
                found: input.len(),
            });
        }
        self.nodes
            .iter()
            .map(|node| {
                let ov = input.overlap(node.truth(Component::Semantic))? as f64 / n as f64;
                Ok((ov.max(0.0) + priming.bonus(&node.id)).min(1.0))
            })
            .collect()
    }

    /// Stage-1 selection without consuming priming.
    pub fn peek_select(
        &self,
        priming: &PrimingState,
        input: &BipolarPattern,
    ) -> Result<Option<Selection>> {
        let scores = self.scores(priming, input)?;
        let mut best: Option<usize> = None;
        for (i, &s) in scores.iter().enumerate() {
            best = match best {
                None => Some(i),
                Some(b)
                    if s > scores[b] || (s == scores[b] && self.nodes[i].id < self.nodes[b].id) =>
                {
                    Some(i)
                }
                keep => keep,
            };
        }
        Ok(best
            .filter(|&b| scores[b] >= self.selection_threshold)
            .map(|b| Selection {
                index: b,
                completeness: scores[b],
            }))
    }
}

/// The node chosen at stage 1 and how completely it was activated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Selection {
    pub index: usize,
    pub completeness: f64,
}

/// Selects the best-scoring node, then ages every priming bonus by one
/// selection. Returns `None` when every score is below the threshold.
pub fn select_node(
    lex: &Lexicon,
    priming: &mut PrimingState,
    input: &BipolarPattern,
) -> Result<Option<Selection>> {
    let out = lex.peek_select(priming, input)?;
    priming.tick();
    Ok(out)
}

/// Additive, decaying selection bonuses keyed by word id.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PrimingState {
    bonuses: BTreeMap<String, (f64, u32)>,
}

impl PrimingState {
    /// Adds `bonus` to `id`'s score for the next `decay_selections`
    /// selections.
    pub fn prime(
        &mut self,
        lex: &Lexicon,
        id: &str,
        bonus: f64,
        decay_selections: u32,
    ) -> Result<()> {
        if lex.get(id).is_none() {
            return Err(Error::Configuration(format!(
                "cannot prime unknown word {id:?}"
            )));
        }
        check_fraction("bonus", bonus)?;
        if decay_selections > 0 {
            self.bonuses
                .insert(id.to_string(), (bonus, decay_selections));
        }
        Ok(())
    }

    pub fn bonus(&self, id: &str) -> f64 {
        self.bonuses.get(id).map_or(0.0, |&(b, _)| b)
    }

    pub fn is_empty(&self) -> bool {
        self.bonuses.is_empty()
    }

    fn tick(&mut self) {
        self.bonuses.retain(|_, (_, left)| {
            *left -= 1;
            *left > 0
        });
    }
}

/// Semantic input for a trial: `truth` with `⌊rate·N⌋` uniformly chosen
/// units flipped.
pub fn corrupt_input<R: Rng + ?Sized>(
    truth: &BipolarPattern,
    flip_rate: f64,
    rng: &mut R,
) -> Result<BipolarPattern> {
    check_fraction("flip_rate", flip_rate)?;
    let n = truth.len();
    let idx = index::sample(rng, n, fraction_count(flip_rate, n)).into_vec();
    truth.flipped(&idx)
}

/// Declarative lexicon description.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct LexiconSpec {
    #[cfg_attr(feature = "serde", serde(default = "default_selection_threshold"))]
    pub selection_threshold: f64,
    /// Phonological slots as half-open `[start, end)` ranges.
    #[cfg_attr(feature = "serde", serde(default))]
    pub slots: BTreeMap<String, [usize; 2]>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub words: Vec<WordSpec>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub generator: Option<GeneratorSpec>,
}

pub fn default_selection_threshold() -> f64 {
    0.3
}

#[cfg(feature = "serde")]
fn default_frequency() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct WordSpec {
    pub id: String,
    #[cfg_attr(feature = "serde", serde(default = "default_frequency"))]
    pub frequency: f64,
    pub semantic: BipolarPattern,
    pub lexical: BipolarPattern,
    pub phonological: BipolarPattern,
    /// Further patterns stored in the same component networks.
    #[cfg_attr(feature = "serde", serde(default))]
    pub extra: PerComponent<Vec<BipolarPattern>>,
}

/// Random words `w0, w1, …` with a minimum pairwise semantic Hamming
/// distance.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct GeneratorSpec {
    pub count: usize,
    pub lengths: PerComponent<usize>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub min_pairwise_distance: usize,
    #[cfg_attr(feature = "serde", serde(default))]
    pub seed: Option<u64>,
    #[cfg_attr(feature = "serde", serde(default = "default_frequency"))]
    pub frequency: f64,
}

/// Draws per generated word before giving up on the distance constraint.
pub const GENERATION_RETRY_BUDGET: usize = 10_000;

impl GeneratorSpec {
    pub fn word_id(i: usize) -> String {
        format!("w{i}")
    }
}

impl LexiconSpec {
    /// Ids of every word the spec declares, in lexicon order.
    pub fn word_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.words.iter().map(|w| w.id.clone()).collect();
        if let Some(g) = &self.generator {
            ids.extend((0..g.count).map(GeneratorSpec::word_id));
        }
        ids
    }

    pub fn phonological_len(&self) -> Option<usize> {
        self.words
            .first()
            .map(|w| w.phonological.len())
            .or_else(|| self.generator.as_ref().map(|g| g.lengths.phonological))
    }

    pub fn slot_map(&self, len: usize) -> Result<SlotMap> {
        let mut map = SlotMap::empty(len);
        for (name, [start, end]) in &self.slots {
            map.insert(name, *start..*end)?;
        }
        Ok(map)
    }
}

/// Builds trained, undamaged word nodes. `rng` feeds the generator block
/// only; explicit words consume no randomness.
pub fn build_lexicon<R: Rng + ?Sized>(spec: &LexiconSpec, rng: &mut R) -> Result<Lexicon> {
    let phon_len = spec
        .phonological_len()
        .ok_or_else(|| Error::Configuration("lexicon declares no words".into()))?;
    let slots = spec.slot_map(phon_len)?;
    let mut nodes = Vec::new();
    for w in &spec.words {
        let truth = PerComponent {
            semantic: w.semantic.clone(),
            lexical: w.lexical.clone(),
            phonological: w.phonological.clone(),
        };
        nodes.push(WordNode::new(
            w.id.clone(),
            w.frequency,
            truth,
            w.extra.clone(),
            slots.clone(),
        )?);
    }
    if let Some(g) = &spec.generator {
        if g.lengths.semantic < g.min_pairwise_distance {
            return Err(Error::Generation(format!(
                "min_pairwise_distance {} exceeds semantic length {}",
                g.min_pairwise_distance, g.lengths.semantic
            )));
        }
        for i in 0..g.count {
            let mut semantic = None;
            for _ in 0..GENERATION_RETRY_BUDGET {
                let cand = BipolarPattern::random(g.lengths.semantic, rng)?;
                let far = nodes.iter().all(|n: &WordNode| {
                    n.truth(Component::Semantic)
                        .hamming(&cand)
                        .is_ok_and(|h| h >= g.min_pairwise_distance)
                });
                if far {
                    semantic = Some(cand);
                    break;
                }
            }
            let semantic = semantic.ok_or_else(|| {
                Error::Generation(format!(
                    "could not place word {i} at semantic distance >= {} within {GENERATION_RETRY_BUDGET} draws",
                    g.min_pairwise_distance
                ))
            })?;
            let truth = PerComponent {
                semantic,
                lexical: BipolarPattern::random(g.lengths.lexical, rng)?,
                phonological: BipolarPattern::random(g.lengths.phonological, rng)?,
            };
            nodes.push(WordNode::new(
                GeneratorSpec::word_id(i),
                g.frequency,
                truth,
                PerComponent::default(),
                slots.clone(),
            )?);
        }
    }
    Lexicon::new(nodes, spec.selection_threshold)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::stream;
    use alloc::vec;
    use proptest::prelude::*;

    fn p(s: &str) -> BipolarPattern {
        s.parse().unwrap()
    }

    fn word(id: &str, sem: &str) -> WordNode {
        let n = sem.len();
        let filler = BipolarPattern::all_plus(5).unwrap();
        WordNode::new(
            id,
            1.0,
            PerComponent {
                semantic: p(sem),
                lexical: filler.clone(),
                phonological: filler,
            },
            PerComponent::default(),
            SlotMap::empty(5),
        )
        .inspect(|w| {
            assert_eq!(w.truth(Component::Semantic).len(), n);
        })
        .unwrap()
    }

    /// A and B with normalized overlaps 0.5 and 0.25 to `INPUT` at N = 8.
    const INPUT: &str = "++++++++";
    const A: &str = "++++++--";
    const B: &str = "+++++---";

    #[test]
    fn exact_input_selects_with_full_completeness() {
        let lex = Lexicon::new(vec![word("a", A), word("b", B)], 0.3).unwrap();
        let sel = select_node(&lex, &mut PrimingState::default(), &p(A))
            .unwrap()
            .unwrap();
        assert_eq!(sel.index, 0);
        assert_eq!(sel.completeness, 1.0);
    }

    #[test]
    fn orthogonal_input_selects_nothing() {
        let lex = Lexicon::new(vec![word("a", "++++"), word("b", "++--")], 0.3).unwrap();
        let input = p("+-+-");
        assert_eq!(
            lex.scores(&PrimingState::default(), &input).unwrap(),
            vec![0.0, 0.0]
        );
        assert_eq!(
            select_node(&lex, &mut PrimingState::default(), &input).unwrap(),
            None
        );
    }

    #[test]
    fn priming_flips_selection_to_b() {
        let lex = Lexicon::new(vec![word("a", A), word("b", B)], 0.3).unwrap();
        let input = p(INPUT);
        let none = PrimingState::default();
        // Hand-computed: overlap(INPUT, A) = 4 → 0.5, overlap(INPUT, B) = 2 → 0.25.
        assert_eq!(lex.scores(&none, &input).unwrap(), vec![0.5, 0.25]);
        assert_eq!(lex.peek_select(&none, &input).unwrap().unwrap().index, 0);

        let mut primed = PrimingState::default();
        primed.prime(&lex, "b", 0.3, 2).unwrap();
        let sel = select_node(&lex, &mut primed, &input).unwrap().unwrap();
        assert_eq!(sel.index, 1);
        assert!((sel.completeness - 0.55).abs() < 1e-12);
        // Second selection still primed, then the bonus expires.
        assert_eq!(
            select_node(&lex, &mut primed, &input)
                .unwrap()
                .unwrap()
                .index,
            1
        );
        assert!(primed.is_empty());
        assert_eq!(
            lex.scores(&primed, &input).unwrap(),
            lex.scores(&none, &input).unwrap()
        );
        assert_eq!(
            select_node(&lex, &mut primed, &input)
                .unwrap()
                .unwrap()
                .index,
            0
        );
    }

    #[test]
    fn zero_bonus_and_priming_the_winner_change_nothing() {
        let lex = Lexicon::new(vec![word("a", A), word("b", B)], 0.3).unwrap();
        let input = p(INPUT);
        let base = lex.peek_select(&PrimingState::default(), &input).unwrap();
        let mut zero = PrimingState::default();
        zero.prime(&lex, "b", 0.0, 5).unwrap();
        assert_eq!(
            lex.peek_select(&zero, &input).unwrap().map(|s| s.index),
            base.map(|s| s.index)
        );
        let mut win = PrimingState::default();
        win.prime(&lex, "a", 0.4, 5).unwrap();
        assert_eq!(lex.peek_select(&win, &input).unwrap().unwrap().index, 0);
    }

    #[test]
    fn priming_errors() {
        let lex = Lexicon::new(vec![word("a", A)], 0.3).unwrap();
        let mut pr = PrimingState::default();
        assert!(pr.prime(&lex, "zzz", 0.1, 1).is_err());
        assert!(pr.prime(&lex, "a", 1.5, 1).is_err());
    }

    #[test]
    fn ties_break_by_smallest_id() {
        let lex = Lexicon::new(vec![word("zeta", A), word("alpha", A)], 0.3).unwrap();
        let sel = lex
            .peek_select(&PrimingState::default(), &p(A))
            .unwrap()
            .unwrap();
        assert_eq!(lex.node(sel.index).id(), "alpha");
    }

    #[test]
    fn lexicon_errors() {
        assert!(Lexicon::new(vec![], 0.3).is_err());
        assert!(Lexicon::new(vec![word("a", A), word("a", B)], 0.3).is_err());
        assert!(Lexicon::new(vec![word("a", A)], 0.0).is_err());
        assert!(Lexicon::new(vec![word("a", A), word("b", "+++")], 0.3).is_err());
        let lex = Lexicon::new(vec![word("a", A)], 0.3).unwrap();
        assert!(lex.scores(&PrimingState::default(), &p("++")).is_err());
    }

    fn generated_spec(count: usize, min: usize) -> LexiconSpec {
        LexiconSpec {
            selection_threshold: 0.3,
            slots: BTreeMap::new(),
            words: vec![],
            generator: Some(GeneratorSpec {
                count,
                lengths: PerComponent::uniform(15),
                min_pairwise_distance: min,
                seed: None,
                frequency: 1.0,
            }),
        }
    }

    #[test]
    fn build_explicit_single_word() {
        let spec = LexiconSpec {
            selection_threshold: 0.5,
            slots: BTreeMap::from([("first_letter".to_string(), [0, 2])]),
            words: vec![WordSpec {
                id: "cat".into(),
                frequency: 2.0,
                semantic: p("+-+"),
                lexical: p("++--"),
                phonological: p("-+-+-"),
                extra: PerComponent::default(),
            }],
            generator: None,
        };
        let lex = build_lexicon(&spec, &mut stream(0)).unwrap();
        assert_eq!(lex.nodes().len(), 1);
        let node = lex.get("cat").unwrap();
        assert_eq!(node.truth(Component::Semantic), &p("+-+"));
        assert_eq!(node.truth(Component::Lexical), &p("++--"));
        assert_eq!(node.truth(Component::Phonological), &p("-+-+-"));
        assert_eq!(node.metamemory_ref(Component::Phonological), &p("-+-+-"));
        assert_eq!(node.slot_map().get("first_letter"), Some(0..2));
    }

    #[test]
    fn build_random_respects_distance_and_seed() {
        let spec = generated_spec(3, 8);
        let lex = build_lexicon(&spec, &mut stream(99)).unwrap();
        let sems: Vec<_> = lex
            .nodes()
            .iter()
            .map(|n| n.truth(Component::Semantic))
            .collect();
        for i in 0..3 {
            for j in i + 1..3 {
                assert!(sems[i].hamming(sems[j]).unwrap() >= 8);
            }
        }
        assert_eq!(lex, build_lexicon(&spec, &mut stream(99)).unwrap());
        assert_eq!(lex.nodes()[2].id(), "w2");
    }

    #[test]
    fn unsatisfiable_distance_is_reported() {
        // At N = 15, three mutually distance-15 patterns cannot exist.
        let err = build_lexicon(&generated_spec(3, 15), &mut stream(1)).unwrap_err();
        assert!(matches!(err, Error::Generation(_)));
        assert!(matches!(
            build_lexicon(&generated_spec(2, 16), &mut stream(1)),
            Err(Error::Generation(_))
        ));
    }

    #[test]
    fn corrupt_input_flips_exact_count() {
        let truth = p("+++++++++");
        let out = corrupt_input(&truth, 1.0 / 3.0, &mut stream(5)).unwrap();
        assert_eq!(truth.hamming(&out).unwrap(), 3);
        assert_eq!(corrupt_input(&truth, 0.0, &mut stream(5)).unwrap(), truth);
    }

    proptest! {
        #[test]
        fn uniform_bonus_never_changes_argmax(seed in any::<u64>(), bonus in 0.0f64..=1.0) {
            let built = build_lexicon(&generated_spec(4, 0), &mut stream(seed)).unwrap();
            let lex = Lexicon::new(built.nodes().to_vec(), 1e-9).unwrap();
            let input = BipolarPattern::random(15, &mut stream(seed ^ 1)).unwrap();
            let none = PrimingState::default();
            let mut all = PrimingState::default();
            for node in lex.nodes() {
                all.prime(&lex, node.id(), bonus, 1).unwrap();
            }
            let max = lex.scores(&none, &input).unwrap().into_iter().fold(0.0, f64::max);
            let base = lex.peek_select(&none, &input).unwrap();
            let primed = lex.peek_select(&all, &input).unwrap();
            if let (Some(b), Some(p)) = (base, primed) {
                if max + bonus <= 1.0 {
                    prop_assert_eq!(b.index, p.index);
                }
            }
        }
    }
}
