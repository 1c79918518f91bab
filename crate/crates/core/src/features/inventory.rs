//! The versioned feature inventory and its rule table.
//!
//! Every entry documents the exact pattern used to count it. Patterns are
//! written against Universal POS tags, Penn Treebank XPOS tags and either
//! UD or ClearNLP-style dependency labels, so output of most English
//! taggers can be fed in unchanged.

use serde::{Deserialize, Serialize};

pub const INVENTORY_VERSION: &str = "B1988-67";
pub const FEATURE_COUNT: usize = 67;

pub const TTR_INDEX: usize = 42;
pub const WORD_LENGTH_INDEX: usize = 43;
/// Window (in lexical tokens) for the type/token ratio.
pub const TTR_WINDOW: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Unit {
    RatePer1000,
    Ratio,
    MeanCharacters,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FeatureDescriptor {
    pub id: &'static str,
    pub name: &'static str,
    pub unit: Unit,
    pub rule: &'static str,
}

const fn rate(id: &'static str, name: &'static str, rule: &'static str) -> FeatureDescriptor {
    FeatureDescriptor {
        id,
        name,
        unit: Unit::RatePer1000,
        rule,
    }
}

pub static FEATURES: [FeatureDescriptor; FEATURE_COUNT] = [
    rate("f_01_past_tense", "past tense verbs", "XPOS VBD"),
    rate(
        "f_02_perfect_aspect",
        "perfect aspect verbs",
        "lemma have, deprel aux, head XPOS VBN",
    ),
    rate("f_03_present_tense", "present tense verbs", "XPOS VBP or VBZ"),
    rate(
        "f_04_place_adverbials",
        "place adverbials",
        "place-adverb list, UPOS ADV",
    ),
    rate(
        "f_05_time_adverbials",
        "time adverbials",
        "time-adverb list, UPOS ADV or NOUN",
    ),
    rate("f_06_first_person_pronouns", "1st person pronouns", "first-person list"),
    rate("f_07_second_person_pronouns", "2nd person pronouns", "second-person list"),
    rate("f_08_third_person_pronouns", "third person pronouns", "third-person list, excluding it"),
    rate("f_09_pronoun_it", "pronoun it", "form it"),
    rate(
        "f_10_demonstrative_pronoun",
        "demonstrative pronouns",
        "this/that/these/those, UPOS PRON, not XPOS WDT, head not a relative clause",
    ),
    rate("f_11_indefinite_pronouns", "indefinite pronouns", "indefinite-pronoun list"),
    rate("f_12_proverb_do", "DO as pro-verb", "lemma do, UPOS VERB"),
    rate(
        "f_13_wh_question",
        "WH questions",
        "sentence ending in ?, first lexical token is a WH word",
    ),
    rate(
        "f_14_nominalizations",
        "nominalizations",
        "UPOS NOUN ending in -tion/-ment/-ness/-ity (plurals included), stem of 3+ characters",
    ),
    rate(
        "f_15_gerunds",
        "gerunds",
        "XPOS VBG in subject or object function",
    ),
    rate(
        "f_16_other_nouns",
        "nouns",
        "UPOS NOUN or PROPN that is not a nominalization",
    ),
    rate(
        "f_17_agentless_passives",
        "agentless passives",
        "verb with a passive auxiliary child and no agent child",
    ),
    rate(
        "f_18_by_passives",
        "BY-passives",
        "verb with a passive auxiliary child and an agent child",
    ),
    rate(
        "f_19_be_main_verb",
        "BE as main verb",
        "lemma be, deprel not aux or passive aux",
    ),
    rate(
        "f_20_existential_there",
        "existential there",
        "form there with XPOS EX or deprel expl",
    ),
    rate(
        "f_21_that_verb_comp",
        "THAT clauses as verb complements",
        "that as mark of a ccomp clause governed by a verb",
    ),
    rate(
        "f_22_that_adj_comp",
        "That clauses as adjective complements",
        "that as mark of a ccomp clause governed by an adjective",
    ),
    rate(
        "f_23_wh_clause",
        "WH clauses",
        "WH word inside a ccomp clause governed by a verb",
    ),
    rate(
        "f_24_infinitives",
        "infinitives",
        "to (PART or TO) whose head has XPOS VB",
    ),
    rate(
        "f_25_present_participle",
        "present participial clauses",
        "XPOS VBG, deprel advcl, no mark/subject/aux child",
    ),
    rate(
        "f_26_past_participle",
        "past participial clauses",
        "XPOS VBN, deprel advcl, no mark/subject/aux child",
    ),
    rate(
        "f_27_past_participle_whiz",
        "past participial WHIZ deletions",
        "XPOS VBN, deprel acl, head is nominal",
    ),
    rate(
        "f_28_present_participle_whiz",
        "present participial WHIZ deletions",
        "XPOS VBG, deprel acl, head is nominal",
    ),
    rate(
        "f_29_that_subj",
        "That relative clause on subject positions",
        "that in subject function inside a relative clause",
    ),
    rate(
        "f_30_that_obj",
        "That relative clause on object positions",
        "that in non-subject function inside a relative clause",
    ),
    rate(
        "f_31_wh_subj",
        "WH relative clauses on subject positions",
        "who/whom/whose/which as subject of a relative clause, not after a preposition or comma",
    ),
    rate(
        "f_32_wh_obj",
        "WH relative clauses on object positions",
        "who/whom/whose/which as non-subject of a relative clause, not after a preposition or comma",
    ),
    rate(
        "f_33_pied_piping",
        "pied piping constructions",
        "who/whom/whose/which directly after an adposition",
    ),
    rate(
        "f_34_sentence_relatives",
        "sentence relatives",
        "which directly after a comma",
    ),
    rate("f_35_because", "causative subordination", "form because"),
    rate(
        "f_36_though",
        "concessive subordination",
        "although/though/tho as subordinator",
    ),
    rate(
        "f_37_if",
        "conditional subordination",
        "if/unless as subordinator",
    ),
    rate(
        "f_38_other_adv_sub",
        "other adverbial subordinators",
        "since/while/whilst/whereupon/whereas/whereby as subordinator, so that, such that, as long as, as soon as, insofar as",
    ),
    rate(
        "f_39_prepositions",
        "prepositions",
        "UPOS ADP, deprel not mark",
    ),
    rate("f_40_adj_attr", "attributive adjectives", "UPOS ADJ, deprel amod"),
    rate(
        "f_41_adj_pred",
        "predicative adjectives",
        "UPOS ADJ with deprel acomp or a copula child",
    ),
    rate("f_42_adverbs", "adverbs", "UPOS ADV"),
    FeatureDescriptor {
        id: "f_43_type_token",
        name: "type/token ratio",
        unit: Unit::Ratio,
        rule: "distinct lower-cased forms over the first 400 lexical tokens",
    },
    FeatureDescriptor {
        id: "f_44_mean_word_length",
        name: "word length",
        unit: Unit::MeanCharacters,
        rule: "mean character count of lexical tokens",
    },
    rate(
        "f_45_conjuncts",
        "conjuncts",
        "conjunct list and conjunct phrases",
    ),
    rate("f_46_downtoners", "downtoners", "downtoner list"),
    rate(
        "f_47_hedges",
        "general hedges",
        "almost, maybe, at about, something like, more or less, sort of / kind of not after a determiner or adjective",
    ),
    rate("f_48_amplifiers", "amplifiers", "amplifier list, UPOS ADV"),
    rate(
        "f_49_emphatics",
        "general emphatics",
        "just/really/most/more as ADV, for sure, a lot, such a(n), so/real + ADJ, affirmative non-question DO auxiliary",
    ),
    rate(
        "f_50_discourse_particles",
        "discourse particles",
        "well/now/anyway/anyhow/anyways as first lexical token of a sentence",
    ),
    rate(
        "f_51_demonstratives",
        "demonstratives",
        "this/that/these/those with deprel det",
    ),
    rate(
        "f_52_modal_possibility",
        "possibility modals",
        "can/may/might/could tagged as modal",
    ),
    rate(
        "f_53_modal_necessity",
        "necessity modals",
        "ought/should/must tagged as modal",
    ),
    rate(
        "f_54_modal_predictive",
        "prediction modals",
        "will/would/shall/'ll/'d/wo tagged as modal",
    ),
    rate("f_55_verb_public", "public verbs", "public-verb lemma list, UPOS VERB"),
    rate("f_56_verb_private", "private verbs", "private-verb lemma list, UPOS VERB"),
    rate("f_57_verb_suasive", "suasive verbs", "suasive-verb lemma list, UPOS VERB"),
    rate("f_58_verb_seem", "SEEM / APPEAR", "lemma seem or appear, UPOS VERB"),
    rate(
        "f_59_contractions",
        "contractions",
        "clitic starting with an apostrophe or n't, excluding possessive 's",
    ),
    rate(
        "f_60_that_deletion",
        "THAT deletion",
        "ccomp verb with a subject and no mark or WH child, governed by a public/private/suasive verb",
    ),
    rate(
        "f_61_stranded_preposition",
        "final prepositions",
        "adposition followed by punctuation or sentence end",
    ),
    rate(
        "f_62_split_infinitive",
        "split infinitives",
        "infinitival to, one or two adverbs, XPOS VB",
    ),
    rate(
        "f_63_split_auxiliary",
        "split auxiliaries",
        "auxiliary or modal, one or two adverbs, verb",
    ),
    rate(
        "f_64_phrasal_coordination",
        "phrasal coordination",
        "and between two tokens of the same class (noun, verb, adjective, adverb)",
    ),
    rate(
        "f_65_clausal_coordination",
        "non-phrasal coordination",
        "sentence-initial and, or comma + and + pronoun/so/then/there",
    ),
    rate(
        "f_66_neg_synthetic",
        "synthetic negation",
        "no before an adjective or noun; neither; nor",
    ),
    rate("f_67_neg_analytic", "analytic negation", "not or n't"),
];

/// The ordered inventory all feature vectors are aligned with.
#[derive(Debug, Clone, Copy)]
pub struct FeatureInventory {
    pub version: &'static str,
    pub features: &'static [FeatureDescriptor; FEATURE_COUNT],
}

impl Default for FeatureInventory {
    fn default() -> Self {
        FeatureInventory {
            version: INVENTORY_VERSION,
            features: &FEATURES,
        }
    }
}

impl FeatureInventory {
    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.features.iter().position(|f| f.id == id)
    }

    pub fn index_by_name(&self, name: &str) -> Option<usize> {
        self.features
            .iter()
            .position(|f| f.name.eq_ignore_ascii_case(name))
    }

    pub fn ids(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.features.iter().map(|f| f.id)
    }
}
