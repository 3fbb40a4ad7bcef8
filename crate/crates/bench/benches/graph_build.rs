use chrono::NaiveDate;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use regionscore::corpus::StopwordSet;
use regionscore::relevance::ThemeId;
use regionscore::synthetic::random_word_lists;
use regionscore::wordnet::{build_graph, Granularity, SliceWindow};
use regionscore::ThemeQuery;
use regionscore_bench::passages_from_word_lists;

fn bench_graph_build(c: &mut Criterion) {
    let theme = ThemeQuery::new(
        ThemeId::Trade,
        &["w1".into(), "w2".into(), "w3".into()],
        "TRADE",
        &StopwordSet::empty(),
    )
    .unwrap();
    let slice = SliceWindow {
        start: NaiveDate::from_ymd_opt(2014, 1, 1).unwrap(),
        end: NaiveDate::from_ymd_opt(2019, 12, 31).unwrap(),
    };
    let mut group = c.benchmark_group("graph_build");
    for &docs in &[100usize, 1000] {
        let passages = passages_from_word_lists(&random_word_lists(docs, 120, 800, 7));
        group.bench_with_input(BenchmarkId::from_parameter(docs), &passages, |b, p| {
            b.iter(|| build_graph(p, 7, &theme, "r1", slice, Granularity::Pooled).unwrap());
        });
    }
    group.finish();
}

criterion_group!(benches, bench_graph_build);
criterion_main!(benches);
