//! Ordered alphabets and word I/O.

use crate::{Error, Result, Symbol, Word};

/// Symbol names in lexicographic order: symbol `i` is `names[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::invalid(format!("duplicate symbol `{n}`")));
            }
            if n.is_empty() || n.chars().any(char::is_whitespace) {
                return Err(Error::invalid(format!("bad symbol name `{n}`")));
            }
        }
        Ok(Alphabet { names })
    }

    /// Single-letter alphabet from the characters of `letters`.
    pub fn letters(letters: &str) -> Self {
        Alphabet::new(letters.chars().map(String::from)).expect("distinct letters")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, s: Symbol) -> &str {
        &self.names[s]
    }

    pub fn symbol(&self, name: &str) -> Option<Symbol> {
        self.names.iter().position(|n| n == name)
    }

    fn single_chars(&self) -> bool {
        self.names.iter().all(|n| n.chars().count() == 1)
    }

    /// Parses a word: letter by letter when every symbol is one character,
    /// otherwise as whitespace-separated names. `""` and `ε` are the empty
    /// word.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let text = text.trim();
        if text.is_empty() || text == "ε" {
            return Ok(Vec::new());
        }
        let lookup = |name: &str| {
            self.symbol(name)
                .ok_or_else(|| Error::invalid(format!("unknown symbol `{name}`")))
        };
        if self.single_chars() && !text.contains(char::is_whitespace) {
            text.chars().map(|c| lookup(&c.to_string())).collect()
        } else {
            text.split_whitespace().map(lookup).collect()
        }
    }

    pub fn format_word(&self, w: &[Symbol]) -> String {
        let sep = if self.single_chars() { "" } else { " " };
        w.iter().map(|&s| self.names[s].as_str()).collect::<Vec<_>>().join(sep)
    }

    /// All words of length `n` in lexicographic order.
    pub fn words(&self, n: usize) -> Vec<Word> {
        let k = self.len();
        if k == 0 {
            return if n == 0 { vec![Vec::new()] } else { Vec::new() };
        }
        let total = k.checked_pow(n as u32).expect("word enumeration too large");
        (0..total)
            .map(|mut idx| {
                let mut w = vec![0; n];
                for slot in w.iter_mut().rev() {
                    *slot = idx % k;
                    idx /= k;
                }
                w
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn words_are_in_lex_order() {
        let a = Alphabet::letters("ab");
        let got: Vec<String> = a.words(2).iter().map(|w| a.format_word(w)).collect();
        assert_eq!(got, ["aa", "ab", "ba", "bb"]);
        assert_eq!(a.words(0), vec![Vec::<Symbol>::new()]);
    }

    #[test]
    fn multi_letter_names() {
        let a = Alphabet::new(["x1", "x2"]).unwrap();
        let w = a.parse_word("x2 x1").unwrap();
        assert_eq!(w, vec![1, 0]);
        assert_eq!(a.format_word(&w), "x2 x1");
    }

    #[test]
    fn rejects_unknown_symbols() {
        assert!(Alphabet::letters("ab").parse_word("abc").is_err());
        assert!(Alphabet::new(["a", "a"]).is_err());
    }
}
