use std::ops::Range;

use super::lemma::{Lemmatizer, Stopwords};

/// One word of source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    /// Lowercase base form.
    pub lemma: String,
    /// Byte range in the source text.
    pub offset: Range<usize>,
    pub is_stopword: bool,
    /// Index of the sentence the token belongs to.
    pub sentence: usize,
}

const CONNECTORS: &[char] = &['/', '-', '.', ','];
const SENTENCE_END: &[char] = &['.', '!', '?', ';'];

/// Splits `text` into word tokens, lemmatizes them and flags stopwords.
///
/// A token is a run of alphanumerics, optionally joined by `/`, `-`, `.` or
/// `,` when both neighbours are alphanumeric (`120/80`, `ST-segment`, `10.2`).
/// Stopwords are flagged, never dropped, so spans stay aligned with the text.
pub fn tokenize_lemmatize(text: &str, lemmatizer: &Lemmatizer, stopwords: &Stopwords) -> Vec<Token> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut tokens = Vec::new();
    let mut sentence = 0;
    let mut i = 0;
    while i < chars.len() {
        let (start, c) = chars[i];
        if !c.is_alphanumeric() {
            if SENTENCE_END.contains(&c) && tokens.last().is_some_and(|t: &Token| t.sentence == sentence) {
                sentence += 1;
            }
            i += 1;
            continue;
        }
        let mut j = i + 1;
        while j < chars.len() {
            let cj = chars[j].1;
            if cj.is_alphanumeric() {
                j += 1;
            } else if CONNECTORS.contains(&cj) && chars.get(j + 1).is_some_and(|(_, n)| n.is_alphanumeric()) {
                // `,` only joins digit groups such as 10,000
                if cj == ',' && !(chars[j - 1].1.is_ascii_digit() && chars[j + 1].1.is_ascii_digit()) {
                    break;
                }
                j += 2;
            } else {
                break;
            }
        }
        let end = chars.get(j).map_or(text.len(), |(b, _)| *b);
        let surface = &text[start..end];
        tokens.push(Token {
            surface: surface.to_string(),
            lemma: lemmatizer.lemma(surface),
            offset: start..end,
            is_stopword: stopwords.contains(surface),
            sentence,
        });
        i = j;
    }
    tokens
}
