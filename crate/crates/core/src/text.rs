//! Shared helpers for the line-based input formats.
//!
//! Blank lines and `#` comments are skipped; line numbers are 1-based.

use std::str::FromStr;

use crate::{Error, Result};

pub(crate) struct Line<'a> {
    pub no: usize,
    pub words: Vec<&'a str>,
}

impl<'a> Line<'a> {
    pub fn key(&self) -> &'a str {
        self.words[0]
    }

    pub fn args(&self) -> &[&'a str] {
        &self.words[1..]
    }

    pub fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.no, msg)
    }

    pub fn parse_at<T: FromStr>(&self, idx: usize, what: &str) -> Result<T> {
        let word = self.words.get(idx).ok_or_else(|| self.err(format!("missing {what}")))?;
        word.parse().map_err(|_| self.err(format!("bad {what} `{word}`")))
    }

    pub fn expect_args(&self, n: usize) -> Result<()> {
        if self.words.len() != n + 1 {
            return Err(self.err(format!(
                "`{}` takes {n} argument(s), got {}",
                self.key(),
                self.words.len() - 1
            )));
        }
        Ok(())
    }
}

pub(crate) fn lines(text: &str) -> impl Iterator<Item = Line<'_>> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let words: Vec<&str> = body.split_whitespace().collect();
        (!words.is_empty()).then_some(Line { no: i + 1, words })
    })
}

/// Index of `name` in `names`, as a parse error on line `no` when absent.
pub(crate) fn lookup(names: &[String], name: &str, what: &str, no: usize) -> Result<usize> {
    names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| Error::parse(no, format!("unknown {what} `{name}`")))
}

pub(crate) fn check_unique(names: &[String], what: &str, no: usize) -> Result<()> {
    for (i, n) in names.iter().enumerate() {
        if names[..i].contains(n) {
            return Err(Error::parse(no, format!("duplicate {what} `{n}`")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn skips_blank_and_comment_lines() {
        let text = "# header\n\nstates 3  # trailing\n  start 0\n";
        let got: Vec<_> = lines(text).map(|l| (l.no, l.words)).collect();
        assert_eq!(got, vec![(3, vec!["states", "3"]), (4, vec!["start", "0"])]);
    }

    #[test]
    fn parse_errors_carry_the_line() {
        let line = lines("\nstates x").next().unwrap();
        let err = line.parse_at::<usize>(1, "state count").unwrap_err();
        assert_eq!(err, Error::parse(2, "bad state count `x`"));
    }
}
