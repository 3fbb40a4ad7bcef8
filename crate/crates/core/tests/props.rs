//! Property tests for the text, graph, and scoring invariants.

use chrono::NaiveDate;
use proptest::prelude::*;

use regionscore::corpus::{
    load_corpus, split_passages, tokenize_text, Article, CorpusFilter, StopwordSet,
};
use regionscore::relevance::{build_tfidf_model, score_passage, ThemeId};
use regionscore::sbs::{betweenness_all, distinctiveness_all, standardize};
use regionscore::synthetic::{random_graph, random_word_lists};
use regionscore::wordnet::{build_graph, merge_graphs, Granularity, SliceWindow};
use regionscore::{CooccurrenceGraph, Passage, ThemeQuery, TokenStream};

fn article(body: &str) -> Article {
    Article {
        id: "a1".into(),
        source: "example.com".into(),
        published_at: NaiveDate::from_ymd_opt(2016, 1, 1).unwrap(),
        title: String::new(),
        body: body.into(),
        language: "eng".into(),
        top_traffic: true,
    }
}

fn pooled() -> SliceWindow {
    SliceWindow {
        start: NaiveDate::from_ymd_opt(2014, 1, 1).unwrap(),
        end: NaiveDate::from_ymd_opt(2019, 12, 31).unwrap(),
    }
}

fn lists_to_passages(lists: &[Vec<String>]) -> Vec<Passage> {
    lists
        .iter()
        .enumerate()
        .map(|(i, words)| {
            let joined = words.join(" ");
            let tokens = tokenize_text(&joined, &StopwordSet::empty());
            Passage {
                article_id: "a1".into(),
                index: i,
                tokens,
                span: (0, joined.chars().count()),
            }
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn tokenization_is_idempotent(text in "[A-Za-z0-9 ,.!?$'%Àèéòù-]{0,160}") {
        let stops = StopwordSet::default_english();
        let once = tokenize_text(&text, &stops);
        let rendered = once.iter().map(|t| t.text.as_str()).collect::<Vec<_>>().join(" ");
        let twice = tokenize_text(&rendered, &stops);
        let a: Vec<&str> = once.iter().map(|t| t.text.as_str()).collect();
        let b: Vec<&str> = twice.iter().map(|t| t.text.as_str()).collect();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn tokens_never_contain_whitespace(text in "\\PC{0,160}") {
        for tok in tokenize_text(&text, &StopwordSet::empty()) {
            prop_assert!(!tok.text.chars().any(char::is_whitespace), "token {:?}", tok.text);
        }
    }

    #[test]
    fn passage_spans_partition_the_body(
        sentences in prop::collection::vec("[a-z]{2,8}( [a-z]{2,8}){0,20}", 1..6),
        max_tokens in 16usize..40,
    ) {
        let body = sentences
            .iter()
            .map(|s| {
                let mut s = s.clone();
                s[0..1].make_ascii_uppercase();
                s.push('.');
                s
            })
            .collect::<Vec<_>>()
            .join(" ");
        let passages = split_passages(&article(&body), max_tokens, &StopwordSet::empty());
        let total = body.chars().count();
        prop_assert!(!passages.is_empty());
        prop_assert_eq!(passages[0].span.0, 0);
        prop_assert_eq!(passages.last().unwrap().span.1, total);
        for w in passages.windows(2) {
            prop_assert_eq!(w[0].span.1, w[1].span.0);
        }
        for p in &passages {
            prop_assert!(p.tokens.len() <= max_tokens);
        }
    }

    #[test]
    fn narrowing_dates_never_adds_articles(
        from_off in 0i64..400,
        to_off in 0i64..400,
    ) {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        use std::io::Write;
        for (i, date) in ["2014-03-01", "2015-06-10", "2016-09-20", "2018-01-05", "2019-11-30"]
            .iter()
            .enumerate()
        {
            writeln!(
                file,
                r#"{{"id":"a{i}","source":"x.com","published_at":"{date}","title":"T","body":"B.","language":"eng","top_traffic":true}}"#
            )
            .unwrap();
        }
        let wide = CorpusFilter {
            date_from: NaiveDate::from_ymd_opt(2014, 1, 1).unwrap(),
            date_to: NaiveDate::from_ymd_opt(2019, 12, 31).unwrap(),
            require_top_traffic: false,
            language: None,
        };
        let mut narrow = wide.clone();
        narrow.date_from += chrono::Duration::days(from_off);
        narrow.date_to -= chrono::Duration::days(to_off);
        prop_assume!(narrow.date_from <= narrow.date_to);
        let all = load_corpus(file.path(), &wide).unwrap().articles.len();
        let subset = load_corpus(file.path(), &narrow).unwrap().articles.len();
        prop_assert!(subset <= all);
    }

    #[test]
    fn partitioned_graph_build_merges_to_single_pass(
        seed in 0u64..5000,
        split in 0usize..10,
        window in 2usize..8,
    ) {
        let theme = ThemeQuery::new(
            ThemeId::Trade,
            &["w1".into(), "w2".into()],
            "TRADE",
            &StopwordSet::empty(),
        ).unwrap();
        let lists = random_word_lists(10, 30, 12, seed);
        let passages = lists_to_passages(&lists);
        let split = split.min(passages.len());
        let single = build_graph(&passages, window, &theme, "r1", pooled(), Granularity::Pooled).unwrap();
        let g1 = build_graph(&passages[..split], window, &theme, "r1", pooled(), Granularity::Pooled).unwrap();
        let g2 = build_graph(&passages[split..], window, &theme, "r1", pooled(), Granularity::Pooled).unwrap();
        let merged = merge_graphs(&[g1, g2], false).unwrap();
        prop_assert_eq!(merged, single);
    }

    #[test]
    fn scaling_weights_preserves_betweenness_and_scales_distinctiveness(
        seed in 0u64..3000,
        factor_exp in 0u32..4,
    ) {
        // Power-of-two factors keep inverse-weight distances exactly
        // representable, so float-equal path ties survive the scaling.
        // Arbitrary factors perturb ties at the last bit and betweenness is
        // discontinuous there.
        let factor = 1u64 << factor_exp;
        let g = random_graph(7, 45, seed);
        let scaled_edges: Vec<(String, String, u64)> = g
            .edge_list()
            .into_iter()
            .map(|(a, b, w)| (a, b, w * factor))
            .collect();
        let counts: Vec<(&str, u64)> = g.node_names().iter().map(|n| (n.as_str(), 1)).collect();
        let edges_ref: Vec<(&str, &str, u64)> = scaled_edges
            .iter()
            .map(|(a, b, w)| (a.as_str(), b.as_str(), *w))
            .collect();
        let scaled = CooccurrenceGraph::from_parts(g.meta().clone(), &counts, &edges_ref);

        // Shortest-path sets are invariant under positive scaling.
        prop_assert_eq!(betweenness_all(&g).unwrap(), betweenness_all(&scaled).unwrap());

        // Distinctiveness scales linearly in the weights.
        let base = distinctiveness_all(&g).unwrap();
        let scaled_d = distinctiveness_all(&scaled).unwrap();
        for (b, s) in base.iter().zip(&scaled_d) {
            prop_assert!((s - b * factor as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn standardized_vectors_have_unit_moments(
        values in prop::collection::vec(-1e3f64..1e3, 2..40),
    ) {
        let z = standardize(&values);
        let n = z.len() as f64;
        let mean = z.iter().sum::<f64>() / n;
        prop_assert!(mean.abs() < 1e-9);
        let sd = (z.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt();
        let distinct = values.iter().any(|v| *v != values[0]);
        if distinct {
            prop_assert!((sd - 1.0).abs() < 1e-9);
        } else {
            prop_assert_eq!(sd, 0.0);
        }
    }

    #[test]
    fn cosine_scores_stay_in_unit_interval(
        seed in 0u64..3000,
    ) {
        let lists = random_word_lists(6, 25, 10, seed);
        let docs: Vec<TokenStream> = lists_to_passages(&lists)
            .into_iter()
            .map(|p| TokenStream { article_id: p.article_id.clone(), tokens: p.tokens })
            .collect();
        prop_assume!(docs.iter().any(|d| !d.tokens.is_empty()));
        let model = build_tfidf_model(&docs).unwrap();
        let theme = ThemeQuery::new(
            ThemeId::Trade,
            &["w1".into(), "w2".into(), "w3".into()],
            "TRADE",
            &StopwordSet::empty(),
        ).unwrap();
        for p in lists_to_passages(&lists) {
            let s = score_passage(&theme, &p, &model).score;
            prop_assert!((0.0..=1.0 + 1e-12).contains(&s), "score {s}");
        }
    }
}
