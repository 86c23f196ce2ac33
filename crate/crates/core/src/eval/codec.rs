//! Decoding of numerals, pairs and relations for display.

use std::fmt::Write;

use super::Hf;

/// Von Neumann numerals.
pub struct NatCodec;

impl NatCodec {
    pub fn encode(n: u64) -> Hf {
        Hf::nat(n)
    }

    /// `Some(n)` iff the value is the numeral `n`.
    pub fn decode(h: &Hf) -> Option<u64> {
        // In canonical order the i-th element of a numeral is the set of the ones before it.
        let es = h.elems();
        for (i, e) in es.iter().enumerate() {
            if e.elems() != &es[..i] {
                return None;
            }
        }
        Some(h.len() as u64)
    }
}

/// Kuratowski pairs `⟨a, b⟩ = {{a}, {a, b}}`.
pub struct PairCodec;

impl PairCodec {
    pub fn encode(a: &Hf, b: &Hf) -> Hf {
        Hf::pair(a, b)
    }

    pub fn decode(h: &Hf) -> Option<(Hf, Hf)> {
        match h.elems() {
            [s] if s.len() == 1 => {
                let a = s.elems()[0].clone();
                Some((a.clone(), a))
            }
            [s, d] if s.len() == 1 && d.len() == 2 => {
                let a = &s.elems()[0];
                let (x, y) = (&d.elems()[0], &d.elems()[1]);
                if x == a {
                    Some((a.clone(), y.clone()))
                } else if y == a {
                    Some((a.clone(), x.clone()))
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// The pairs of a set all of whose elements are pairs.
    pub fn decode_relation(h: &Hf) -> Option<Vec<(Hf, Hf)>> {
        h.elems().iter().map(PairCodec::decode).collect()
    }
}

/// How to render values.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Style {
    /// Show numerals as decimal numbers.
    pub nat: bool,
    /// Show pairs as `<a, b>`.
    pub pairs: bool,
}

/// Renders `h`, decoding numerals and pairs at every level as requested.
pub fn render(h: &Hf, style: Style) -> String {
    let mut out = String::new();
    render_into(h, style, &mut out);
    out
}

fn render_into(h: &Hf, style: Style, out: &mut String) {
    if style.nat {
        if let Some(n) = NatCodec::decode(h) {
            let _ = write!(out, "{n}");
            return;
        }
    }
    if style.pairs {
        if let Some((a, b)) = PairCodec::decode(h) {
            out.push('<');
            render_into(&a, style, out);
            out.push_str(", ");
            render_into(&b, style, out);
            out.push('>');
            return;
        }
    }
    out.push('{');
    for (i, e) in h.elems().iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        render_into(e, style, out);
    }
    out.push('}');
}
