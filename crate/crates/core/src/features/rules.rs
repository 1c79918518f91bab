//! Pattern matching over one tagged sentence at a time. See the rule column
//! of [`super::inventory::FEATURES`] for the human-readable definitions;
//! the two must stay in sync.

use super::inventory::{FEATURE_COUNT, TTR_INDEX, TTR_WINDOW, WORD_LENGTH_INDEX};
use super::lexicon::*;
use crate::corpus::{TaggedDocument, TaggedToken};

/// Raw per-document tallies before rate normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct RawCounts {
    /// Indexed like the inventory. The type/token and word-length slots hold
    /// their final values.
    pub counts: [f64; FEATURE_COUNT],
    pub lexical_tokens: usize,
}

fn normalize(s: &str) -> String {
    s.to_lowercase().replace('\u{2019}', "'")
}

fn is_subject(deprel: &str) -> bool {
    matches!(
        deprel,
        "nsubj" | "nsubjpass" | "nsubj:pass" | "csubj" | "csubjpass" | "csubj:pass"
    )
}

fn is_aux(deprel: &str) -> bool {
    matches!(deprel, "aux" | "auxpass" | "aux:pass")
}

fn is_passive_aux(deprel: &str) -> bool {
    matches!(deprel, "auxpass" | "aux:pass")
}

fn is_agent(deprel: &str) -> bool {
    matches!(deprel, "agent" | "obl:agent")
}

fn is_relcl(deprel: &str) -> bool {
    matches!(deprel, "relcl" | "acl:relcl")
}

fn is_gerund_function(deprel: &str) -> bool {
    is_subject(deprel) || matches!(deprel, "dobj" | "obj" | "iobj" | "pobj")
}

fn is_nominal(upos: &str) -> bool {
    matches!(upos, "NOUN" | "PROPN" | "PRON")
}

fn word_class(upos: &str) -> Option<&'static str> {
    match upos {
        "NOUN" | "PROPN" => Some("noun"),
        "VERB" => Some("verb"),
        "ADJ" => Some("adj"),
        "ADV" => Some("adv"),
        _ => None,
    }
}

struct SentenceView<'a> {
    tokens: &'a [TaggedToken],
    lower: Vec<String>,
    lemma: Vec<String>,
    children: Vec<Vec<usize>>,
    first_lexical: Option<usize>,
    is_question: bool,
}

impl<'a> SentenceView<'a> {
    fn new(tokens: &'a [TaggedToken]) -> Self {
        let mut children = vec![Vec::new(); tokens.len()];
        for (i, t) in tokens.iter().enumerate() {
            if t.head > 0 && t.head <= tokens.len() {
                children[t.head - 1].push(i);
            }
        }
        let is_question = tokens
            .iter()
            .rev()
            .find(|t| !t.is_space)
            .is_some_and(|t| t.surface.ends_with('?'));
        SentenceView {
            tokens,
            lower: tokens.iter().map(|t| normalize(&t.surface)).collect(),
            lemma: tokens.iter().map(|t| normalize(&t.lemma)).collect(),
            children,
            first_lexical: tokens.iter().position(|t| t.is_lexical()),
            is_question,
        }
    }

    fn upos(&self, i: usize) -> &str {
        &self.tokens[i].upos
    }

    fn xpos(&self, i: usize) -> &str {
        self.tokens[i].xpos()
    }

    fn deprel(&self, i: usize) -> &str {
        &self.tokens[i].deprel
    }

    fn parent(&self, i: usize) -> Option<usize> {
        let head = self.tokens[i].head;
        (head > 0 && head <= self.tokens.len()).then(|| head - 1)
    }

    fn has_child(&self, i: usize, pred: impl Fn(usize) -> bool) -> bool {
        self.children[i].iter().any(|&c| pred(c))
    }

    fn prev(&self, i: usize) -> Option<usize> {
        (0..i).rev().find(|&j| !self.tokens[j].is_space)
    }

    fn next(&self, i: usize) -> Option<usize> {
        (i + 1..self.tokens.len()).find(|&j| !self.tokens[j].is_space)
    }

    fn phrase_at(&self, i: usize, phrase: &[&str]) -> bool {
        let mut j = i;
        for (k, word) in phrase.iter().enumerate() {
            if k > 0 {
                match self.next(j) {
                    Some(n) => j = n,
                    None => return false,
                }
            }
            if self.lower[j] != *word {
                return false;
            }
        }
        true
    }

    fn is_wh(&self, i: usize) -> bool {
        match self.tokens[i].xpos.as_deref() {
            Some(x) => matches!(x, "WDT" | "WP" | "WP$" | "WRB"),
            None => contains(WH_WORDS, &self.lower[i]),
        }
    }

    fn is_modal(&self, i: usize) -> bool {
        match self.tokens[i].xpos.as_deref() {
            Some(x) => x == "MD",
            None => self.upos(i) == "AUX",
        }
    }

    fn is_subordinator(&self, i: usize) -> bool {
        self.deprel(i) == "mark" || self.upos(i) == "SCONJ"
    }

    fn is_infinitive_to(&self, i: usize) -> bool {
        self.lower[i] == "to" && (self.upos(i) == "PART" || self.xpos(i) == "TO")
    }

    fn is_nominalization(&self, i: usize) -> bool {
        self.upos(i) == "NOUN"
            && NOMINAL_SUFFIXES.iter().any(|suffix| {
                let w = &self.lower[i];
                w.ends_with(suffix) && w.chars().count() >= suffix.chars().count() + 3
            })
    }

    /// Skips one or two adverbs after `i` and returns the token that follows,
    /// if at least one adverb was skipped.
    fn after_adverbs(&self, i: usize) -> Option<usize> {
        let mut j = self.next(i)?;
        let mut skipped = 0;
        while self.upos(j) == "ADV" && skipped < 2 {
            skipped += 1;
            j = self.next(j)?;
        }
        (skipped > 0).then_some(j)
    }

    fn is_emphatic_do(&self, i: usize) -> bool {
        if self.lemma[i] != "do" || self.upos(i) != "AUX" || self.deprel(i) != "aux" {
            return false;
        }
        if self.is_question {
            return false;
        }
        match self.parent(i) {
            Some(p) => {
                self.upos(p) == "VERB"
                    && !self.has_child(p, |c| matches!(self.lower[c].as_str(), "not" | "n't"))
            }
            None => false,
        }
    }

    fn tally(&self, counts: &mut [f64; FEATURE_COUNT]) {
        let mut hit = |feature: usize| counts[feature - 1] += 1.0;

        if let Some(first) = self.first_lexical {
            if self.is_question && self.is_wh(first) {
                hit(13);
            }
            if contains(DISCOURSE_PARTICLES, &self.lower[first]) {
                hit(50);
            }
        }

        for i in 0..self.tokens.len() {
            if !self.tokens[i].is_lexical() {
                continue;
            }
            let w = self.lower[i].as_str();
            let lemma = self.lemma[i].as_str();
            let upos = self.upos(i);
            let xpos = self.xpos(i);
            let deprel = self.deprel(i);
            let parent = self.parent(i);
            let prev = self.prev(i);
            let next = self.next(i);

            // tense and aspect
            if xpos == "VBD" {
                hit(1);
            }
            if lemma == "have" && deprel == "aux" && parent.is_some_and(|p| self.xpos(p) == "VBN")
            {
                hit(2);
            }
            if matches!(xpos, "VBP" | "VBZ") {
                hit(3);
            }

            // adverbials
            if contains(PLACE_ADVERBS, w) && upos == "ADV" {
                hit(4);
            }
            if contains(TIME_ADVERBS, w) && matches!(upos, "ADV" | "NOUN") {
                hit(5);
            }

            // pronouns and pro-verbs
            if contains(FIRST_PERSON, w) {
                hit(6);
            }
            if contains(SECOND_PERSON, w) {
                hit(7);
            }
            if contains(THIRD_PERSON, w) {
                hit(8);
            }
            if w == "it" {
                hit(9);
            }
            if contains(DEMONSTRATIVES, w)
                && upos == "PRON"
                && xpos != "WDT"
                && !parent.is_some_and(|p| is_relcl(self.deprel(p)))
            {
                hit(10);
            }
            if contains(INDEFINITE_PRONOUNS, w) {
                hit(11);
            }
            if lemma == "do" && upos == "VERB" {
                hit(12);
            }

            // nominal forms
            let nominalization = self.is_nominalization(i);
            if nominalization {
                hit(14);
            }
            if xpos == "VBG" && is_gerund_function(deprel) {
                hit(15);
            }
            if matches!(upos, "NOUN" | "PROPN") && !nominalization {
                hit(16);
            }

            // passives
            if self.has_child(i, |c| is_passive_aux(self.deprel(c))) {
                if self.has_child(i, |c| is_agent(self.deprel(c))) {
                    hit(18);
                } else {
                    hit(17);
                }
            }

            // stative forms
            if lemma == "be" && !is_aux(deprel) {
                hit(19);
            }
            if w == "there" && (xpos == "EX" || deprel == "expl") {
                hit(20);
            }

            // complement clauses
            if w == "that" && deprel == "mark" {
                if let Some(p) = parent.filter(|&p| self.deprel(p) == "ccomp") {
                    match self.parent(p).map(|g| self.upos(g)) {
                        Some("VERB" | "AUX") => hit(21),
                        Some("ADJ") => hit(22),
                        _ => {}
                    }
                }
            }
            if self.is_wh(i) {
                if let Some(p) = parent.filter(|&p| self.deprel(p) == "ccomp") {
                    if self
                        .parent(p)
                        .is_some_and(|g| matches!(self.upos(g), "VERB" | "AUX"))
                    {
                        hit(23);
                    }
                }
            }
            if self.is_infinitive_to(i) && parent.is_some_and(|p| self.xpos(p) == "VB") {
                hit(24);
            }

            // participial clauses
            let bare_clause = || {
                !self.has_child(i, |c| {
                    let d = self.deprel(c);
                    d == "mark" || is_subject(d) || is_aux(d)
                })
            };
            if xpos == "VBG" && deprel == "advcl" && bare_clause() {
                hit(25);
            }
            if xpos == "VBN" && deprel == "advcl" && bare_clause() {
                hit(26);
            }
            let nominal_head = parent.is_some_and(|p| is_nominal(self.upos(p)));
            if xpos == "VBN" && deprel == "acl" && nominal_head {
                hit(27);
            }
            if xpos == "VBG" && deprel == "acl" && nominal_head {
                hit(28);
            }

            // relatives
            let in_relative = parent.is_some_and(|p| is_relcl(self.deprel(p)));
            if w == "that" && deprel != "mark" && in_relative {
                if is_subject(deprel) {
                    hit(29);
                } else {
                    hit(30);
                }
            }
            if contains(RELATIVE_WH, w) {
                let after_comma = prev.is_some_and(|p| self.tokens[p].surface == ",");
                let after_adposition = prev.is_some_and(|p| self.upos(p) == "ADP");
                if w == "which" && after_comma {
                    hit(34);
                } else if after_adposition {
                    hit(33);
                } else if in_relative {
                    if is_subject(deprel) {
                        hit(31);
                    } else {
                        hit(32);
                    }
                }
            }

            // adverbial subordination
            if w == "because" {
                hit(35);
            }
            if contains(CONCESSIVE, w) && self.is_subordinator(i) {
                hit(36);
            }
            if contains(CONDITIONAL, w) && self.is_subordinator(i) {
                hit(37);
            }
            let so_that = matches!(w, "so" | "such")
                && next.is_some_and(|n| self.lower[n] == "that" && self.deprel(n) == "mark");
            if (contains(OTHER_SUBORDINATORS, w) && self.is_subordinator(i))
                || so_that
                || OTHER_SUBORDINATOR_PHRASES
                    .iter()
                    .any(|phrase| self.phrase_at(i, phrase))
            {
                hit(38);
            }

            // prepositions, adjectives, adverbs
            if upos == "ADP" && deprel != "mark" {
                hit(39);
                if next.is_none_or(|n| self.tokens[n].is_punct) {
                    hit(61);
                }
            }
            if upos == "ADJ" && deprel == "amod" {
                hit(40);
            }
            if upos == "ADJ" && (deprel == "acomp" || self.has_child(i, |c| self.deprel(c) == "cop"))
            {
                hit(41);
            }
            if upos == "ADV" {
                hit(42);
            }

            // lexical classes
            if contains(CONJUNCTS, w) || CONJUNCT_PHRASES.iter().any(|p| self.phrase_at(i, p)) {
                hit(45);
            }
            if contains(DOWNTONERS, w) {
                hit(46);
            }
            let loose_kind_of = matches!(w, "sort" | "kind")
                && next.is_some_and(|n| self.lower[n] == "of")
                && !prev.is_some_and(|p| matches!(self.upos(p), "DET" | "ADJ"));
            if contains(HEDGES, w)
                || HEDGE_PHRASES.iter().any(|p| self.phrase_at(i, p))
                || loose_kind_of
            {
                hit(47);
            }
            if contains(AMPLIFIERS, w) && upos == "ADV" {
                hit(48);
            }
            let intensified_adj =
                matches!(w, "so" | "real") && next.is_some_and(|n| self.upos(n) == "ADJ");
            if (contains(EMPHATIC_ADVERBS, w) && upos == "ADV")
                || EMPHATIC_PHRASES.iter().any(|p| self.phrase_at(i, p))
                || intensified_adj
                || self.is_emphatic_do(i)
            {
                hit(49);
            }
            if contains(DEMONSTRATIVES, w) && deprel == "det" {
                hit(51);
            }

            // modals
            if self.is_modal(i) {
                if contains(POSSIBILITY_MODALS, w) {
                    hit(52);
                }
                if contains(NECESSITY_MODALS, w) {
                    hit(53);
                }
                if contains(PREDICTIVE_MODALS, w) {
                    hit(54);
                }
            }

            // specialized verb classes
            if upos == "VERB" {
                if contains(PUBLIC_VERBS, lemma) {
                    hit(55);
                }
                if contains(PRIVATE_VERBS, lemma) {
                    hit(56);
                }
                if contains(SUASIVE_VERBS, lemma) {
                    hit(57);
                }
                if contains(SEEM_APPEAR, lemma) {
                    hit(58);
                }
            }

            // reduced forms
            let possessive = xpos == "POS" || (w == "'s" && deprel == "case");
            if (w.starts_with('\'') || w == "n't") && !possessive {
                hit(59);
            }
            if deprel == "ccomp"
                && matches!(upos, "VERB" | "AUX")
                && parent.is_some_and(|p| {
                    let l = self.lemma[p].as_str();
                    contains(PUBLIC_VERBS, l) || contains(PRIVATE_VERBS, l) || contains(SUASIVE_VERBS, l)
                })
                && !self.has_child(i, |c| self.deprel(c) == "mark" || self.is_wh(c))
                && self.has_child(i, |c| is_subject(self.deprel(c)) || self.deprel(c) == "expl")
            {
                hit(60);
            }
            if self.is_infinitive_to(i)
                && self.after_adverbs(i).is_some_and(|j| self.xpos(j) == "VB")
            {
                hit(62);
            }
            if (is_aux(deprel) || self.is_modal(i))
                && self
                    .after_adverbs(i)
                    .is_some_and(|j| matches!(self.upos(j), "VERB" | "AUX"))
            {
                hit(63);
            }

            // coordination
            if w == "and" {
                let same_class = match (prev, next) {
                    (Some(p), Some(n)) => {
                        word_class(self.upos(p)).is_some()
                            && word_class(self.upos(p)) == word_class(self.upos(n))
                    }
                    _ => false,
                };
                if same_class {
                    hit(64);
                }
                let clause_start = self.first_lexical == Some(i)
                    || (prev.is_some_and(|p| self.tokens[p].surface == ",")
                        && next.is_some_and(|n| {
                            self.upos(n) == "PRON"
                                || matches!(self.lower[n].as_str(), "so" | "then" | "there")
                        }));
                if clause_start {
                    hit(65);
                }
            }

            // negation
            if (w == "no" && next.is_some_and(|n| matches!(self.upos(n), "ADJ" | "NOUN" | "PROPN")))
                || w == "neither"
                || w == "nor"
            {
                hit(66);
            }
            if w == "not" || w == "n't" {
                hit(67);
            }
        }
    }
}

pub fn raw_counts(doc: &TaggedDocument) -> RawCounts {
    let mut counts = [0.0; FEATURE_COUNT];
    for sentence in &doc.sentences {
        SentenceView::new(&sentence.tokens).tally(&mut counts);
    }

    let lexical: Vec<&TaggedToken> = doc.tokens().filter(|t| t.is_lexical()).collect();
    if !lexical.is_empty() {
        let window = &lexical[..lexical.len().min(TTR_WINDOW)];
        let types: std::collections::HashSet<String> =
            window.iter().map(|t| normalize(&t.surface)).collect();
        counts[TTR_INDEX] = types.len() as f64 / window.len() as f64;
        let chars: usize = lexical.iter().map(|t| t.surface.chars().count()).sum();
        counts[WORD_LENGTH_INDEX] = chars as f64 / lexical.len() as f64;
    }
    RawCounts {
        counts,
        lexical_tokens: lexical.len(),
    }
}
