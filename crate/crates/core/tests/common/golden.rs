//! Hand counts for `fixtures/golden12.conllu`, tallied sentence by sentence
//! against the documented rule table. 115 lexical tokens in total.

pub const GOLDEN_CONLLU: &str = include_str!("../fixtures/golden12.conllu");

pub const LEXICAL_TOKENS: f64 = 115.0;
/// Distinct lower-cased forms among the 115 lexical tokens.
pub const DISTINCT_FORMS: f64 = 88.0;
/// Sum of character lengths of the 115 lexical tokens.
pub const TOTAL_CHARS: f64 = 482.0;

/// (feature id, raw count). Type/token ratio and mean word length are
/// checked separately.
pub const RAW_COUNTS: &[(&str, f64)] = &[
    ("f_01_past_tense", 10.0),
    ("f_02_perfect_aspect", 1.0),
    ("f_03_present_tense", 10.0),
    ("f_04_place_adverbials", 1.0),
    ("f_05_time_adverbials", 1.0),
    ("f_06_first_person_pronouns", 5.0),
    ("f_07_second_person_pronouns", 3.0),
    ("f_08_third_person_pronouns", 7.0),
    ("f_09_pronoun_it", 2.0),
    ("f_10_demonstrative_pronoun", 1.0),
    ("f_11_indefinite_pronouns", 1.0),
    ("f_12_proverb_do", 0.0),
    ("f_13_wh_question", 1.0),
    ("f_14_nominalizations", 2.0),
    ("f_15_gerunds", 0.0),
    ("f_16_other_nouns", 11.0),
    ("f_17_agentless_passives", 2.0),
    ("f_18_by_passives", 1.0),
    ("f_19_be_main_verb", 4.0),
    ("f_20_existential_there", 1.0),
    ("f_21_that_verb_comp", 1.0),
    ("f_22_that_adj_comp", 0.0),
    ("f_23_wh_clause", 0.0),
    ("f_24_infinitives", 2.0),
    ("f_25_present_participle", 1.0),
    ("f_26_past_participle", 0.0),
    ("f_27_past_participle_whiz", 0.0),
    ("f_28_present_participle_whiz", 0.0),
    ("f_29_that_subj", 0.0),
    ("f_30_that_obj", 1.0),
    ("f_31_wh_subj", 1.0),
    ("f_32_wh_obj", 1.0),
    ("f_33_pied_piping", 0.0),
    ("f_34_sentence_relatives", 1.0),
    ("f_35_because", 2.0),
    ("f_36_though", 0.0),
    ("f_37_if", 1.0),
    ("f_38_other_adv_sub", 0.0),
    ("f_39_prepositions", 3.0),
    ("f_40_adj_attr", 1.0),
    ("f_41_adj_pred", 2.0),
    ("f_42_adverbs", 8.0),
    ("f_45_conjuncts", 1.0),
    ("f_46_downtoners", 1.0),
    ("f_47_hedges", 1.0),
    ("f_48_amplifiers", 0.0),
    ("f_49_emphatics", 1.0),
    ("f_50_discourse_particles", 1.0),
    ("f_51_demonstratives", 1.0),
    ("f_52_modal_possibility", 1.0),
    ("f_53_modal_necessity", 1.0),
    ("f_54_modal_predictive", 2.0),
    ("f_55_verb_public", 2.0),
    ("f_56_verb_private", 3.0),
    ("f_57_verb_suasive", 1.0),
    ("f_58_verb_seem", 1.0),
    ("f_59_contractions", 2.0),
    ("f_60_that_deletion", 1.0),
    ("f_61_stranded_preposition", 1.0),
    ("f_62_split_infinitive", 1.0),
    ("f_63_split_auxiliary", 1.0),
    ("f_64_phrasal_coordination", 2.0),
    ("f_65_clausal_coordination", 1.0),
    ("f_66_neg_synthetic", 1.0),
    ("f_67_neg_analytic", 2.0),
];
