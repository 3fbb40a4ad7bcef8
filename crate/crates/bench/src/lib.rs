//! Shared helpers for the benchmark targets.

use regionscore::corpus::{Passage, Token};

/// Turn word lists into passages with synthetic spans.
pub fn passages_from_word_lists(lists: &[Vec<String>]) -> Vec<Passage> {
    lists
        .iter()
        .enumerate()
        .map(|(i, words)| {
            let mut tokens = Vec::with_capacity(words.len());
            let mut pos = 0usize;
            for w in words {
                let len = w.chars().count();
                tokens.push(Token {
                    text: w.clone(),
                    start: pos,
                    end: pos + len,
                });
                pos += len + 1;
            }
            Passage {
                article_id: format!("doc{i}"),
                index: 0,
                tokens,
                span: (0, pos.saturating_sub(1)),
            }
        })
        .collect()
}
