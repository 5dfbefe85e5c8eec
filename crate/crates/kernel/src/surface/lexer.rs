//! Tokenizer for `.hw` sources.

use std::sync::Arc;

use crate::diag::{Diagnostic, ErrorCode, Pos, Span};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Kw(Kw),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Colon,
    Define,
    FatArrow,
    Arrow,
    Star,
    Dot,
    Eof,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kw {
    Def,
    Axiom,
    Import,
    Fun,
    Pi,
    Sig,
    W,
    Let,
    In,
    U,
    Zero,
    One,
    Two,
    Bit0,
    Bit1,
    Unit,
    Prim(Prim),
}

/// Keyword-headed eliminators and constants with a fixed argument list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Prim {
    Refl,
    Id,
    IdRec,
    Fst,
    Snd,
    Split,
    ZeroElim,
    OneElim,
    OneComp,
    TwoRec,
    TwoComp0,
    TwoComp1,
    Sup,
    WRec,
    WComp,
    FunExt,
    EtaPi,
}

impl Prim {
    /// Binder count per argument; `None` marks a plain term argument.
    pub fn shape(self) -> &'static [Option<usize>] {
        use Prim::*;
        match self {
            Refl | Fst | Snd => &[None],
            Id => &[None, None, None],
            IdRec => &[Some(3), Some(1), None, None, None],
            Split => &[Some(1), Some(2), None],
            ZeroElim => &[Some(1), None],
            OneElim => &[Some(1), None, None],
            OneComp => &[Some(1), None],
            TwoRec => &[Some(1), None, None, None],
            TwoComp0 | TwoComp1 => &[Some(1), None, None],
            Sup => &[None, None],
            WRec => &[Some(1), Some(3), None],
            WComp => &[Some(1), Some(3), None, None],
            FunExt => &[None, None],
            EtaPi => &[None, Some(1)],
        }
    }

    pub fn keyword(self) -> &'static str {
        use Prim::*;
        match self {
            Refl => "refl",
            Id => "Id",
            IdRec => "idrec",
            Fst => "fst",
            Snd => "snd",
            Split => "split",
            ZeroElim => "0-elim",
            OneElim => "1-elim",
            OneComp => "1comp",
            TwoRec => "2rec",
            TwoComp0 => "2comp0",
            TwoComp1 => "2comp1",
            Sup => "sup",
            WRec => "wrec",
            WComp => "wcomp",
            FunExt => "funext",
            EtaPi => "etapi",
        }
    }
}

pub const PRIMS: [Prim; 17] = [
    Prim::Refl,
    Prim::Id,
    Prim::IdRec,
    Prim::Fst,
    Prim::Snd,
    Prim::Split,
    Prim::ZeroElim,
    Prim::OneElim,
    Prim::OneComp,
    Prim::TwoRec,
    Prim::TwoComp0,
    Prim::TwoComp1,
    Prim::Sup,
    Prim::WRec,
    Prim::WComp,
    Prim::FunExt,
    Prim::EtaPi,
];

fn keyword(word: &str) -> Option<Kw> {
    Some(match word {
        "def" => Kw::Def,
        "axiom" => Kw::Axiom,
        "import" => Kw::Import,
        "fun" | "λ" => Kw::Fun,
        "Pi" | "Π" => Kw::Pi,
        "Sig" | "Σ" => Kw::Sig,
        "W" => Kw::W,
        "let" => Kw::Let,
        "in" => Kw::In,
        "U" => Kw::U,
        "0" => Kw::Zero,
        "1" => Kw::One,
        "2" => Kw::Two,
        "0b" | "0₂" => Kw::Bit0,
        "1b" | "1₂" => Kw::Bit1,
        "star" | "⋆" => Kw::Unit,
        _ => return PRIMS.iter().find(|p| p.keyword() == word).map(|p| Kw::Prim(*p)),
    })
}

/// True if `s` can be used as a binder or declaration name.
pub fn is_identifier(s: &str) -> bool {
    let mut cs = s.chars();
    match cs.next() {
        Some(c) if c.is_alphabetic() || c == '_' => {}
        _ => return false,
    }
    cs.all(is_ident_char) && keyword(s).is_none()
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

pub fn lex(file: &Arc<str>, text: &str) -> Result<Vec<Token>, Diagnostic> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    let mut line = 1u32;
    let mut line_start = 0usize;
    let pos_at = |byte: usize, line: u32, line_start: usize| Pos {
        line,
        col: (byte - line_start) as u32 + 1,
    };
    while i < chars.len() {
        let (b, c) = chars[i];
        if c == '\n' {
            line += 1;
            line_start = b + 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = pos_at(b, line, line_start);
        let next = chars.get(i + 1).map(|x| x.1);
        if c == '-' && next == Some('-') {
            while i < chars.len() && chars[i].1 != '\n' {
                i += 1;
            }
            continue;
        }
        let (tok, len) = match (c, next) {
            (':', Some('=')) => (Tok::Define, 2),
            ('=', Some('>')) => (Tok::FatArrow, 2),
            ('-', Some('>')) => (Tok::Arrow, 2),
            ('→', _) => (Tok::Arrow, 1),
            ('⇒', _) => (Tok::FatArrow, 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            ('[', _) => (Tok::LBrack, 1),
            (']', _) => (Tok::RBrack, 1),
            (',', _) => (Tok::Comma, 1),
            (':', _) => (Tok::Colon, 1),
            ('*', _) | ('×', _) => (Tok::Star, 1),
            ('.', _) => (Tok::Dot, 1),
            _ => {
                let mut j = i;
                if c.is_ascii_digit() {
                    while j < chars.len() && (is_ident_char(chars[j].1) || chars[j].1 == '₂') {
                        j += 1;
                    }
                    let word: String = chars[i..j].iter().map(|x| x.1).collect();
                    let rest: String = chars[j..chars.len().min(j + 5)].iter().map(|x| x.1).collect();
                    let word = if (word == "0" || word == "1") && rest == "-elim" {
                        j += 5;
                        format!("{word}-elim")
                    } else {
                        word
                    };
                    match keyword(&word) {
                        Some(k) => (Tok::Kw(k), j - i),
                        None => {
                            let end = pos_at(chars.get(j).map_or(text.len(), |x| x.0), line, line_start);
                            return Err(
                                Diagnostic::new(ErrorCode::Lexical, format!("unknown numeric token `{word}`"))
                                    .at(Span::new(file.clone(), start, end)),
                            );
                        }
                    }
                } else if c.is_alphabetic() || c == '_' || c == '⋆' {
                    j += 1;
                    if c != '⋆' {
                        while j < chars.len() && is_ident_char(chars[j].1) {
                            j += 1;
                        }
                    }
                    let word: String = chars[i..j].iter().map(|x| x.1).collect();
                    match keyword(&word) {
                        Some(k) => (Tok::Kw(k), j - i),
                        None => (Tok::Ident(word), j - i),
                    }
                } else {
                    let end = pos_at(b + c.len_utf8(), line, line_start);
                    return Err(
                        Diagnostic::new(ErrorCode::Lexical, format!("unexpected character `{c}`")).at(Span::new(
                            file.clone(),
                            start,
                            end,
                        )),
                    );
                }
            }
        };
        i += len;
        let end_byte = chars.get(i).map_or(text.len(), |x| x.0);
        out.push(Token {
            tok,
            span: Span::new(file.clone(), start, pos_at(end_byte, line, line_start)),
        });
    }
    let end = pos_at(text.len(), line, line_start);
    out.push(Token {
        tok: Tok::Eof,
        span: Span::new(file.clone(), end, end),
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        lex(&Arc::from("t"), s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn numerals_and_eliminator_keywords() {
        assert_eq!(
            toks("0b 1₂ 0-elim 2rec 2comp1 1comp"),
            vec![
                Tok::Kw(Kw::Bit0),
                Tok::Kw(Kw::Bit1),
                Tok::Kw(Kw::Prim(Prim::ZeroElim)),
                Tok::Kw(Kw::Prim(Prim::TwoRec)),
                Tok::Kw(Kw::Prim(Prim::TwoComp1)),
                Tok::Kw(Kw::Prim(Prim::OneComp)),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn arrows_and_comments() {
        assert_eq!(
            toks("a -> b -- trailing\n=> :="),
            vec![
                Tok::Ident("a".into()),
                Tok::Arrow,
                Tok::Ident("b".into()),
                Tok::FatArrow,
                Tok::Define,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn zero_arrow_is_not_elim() {
        assert_eq!(
            toks("0 -> 1"),
            vec![Tok::Kw(Kw::Zero), Tok::Arrow, Tok::Kw(Kw::One), Tok::Eof]
        );
    }

    #[test]
    fn spans_are_one_based() {
        let t = lex(&Arc::from("t"), "def\n  foo").unwrap();
        assert_eq!(t[1].span.start, Pos { line: 2, col: 3 });
        assert_eq!(t[1].span.end, Pos { line: 2, col: 6 });
    }

    #[test]
    fn bad_character_is_lexical_error() {
        let e = lex(&Arc::from("t"), "def x := #").unwrap_err();
        assert_eq!(e.code, ErrorCode::Lexical);
    }

    #[test]
    fn identifier_predicate() {
        assert!(is_identifier("transport"));
        assert!(is_identifier("x'"));
        assert!(!is_identifier("fun"));
        assert!(!is_identifier("2rec"));
    }
}
