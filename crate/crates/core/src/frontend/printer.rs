use std::fmt::Write as _;

use crate::kernel::{Pattern, PatternKind};
use crate::signature::Signature;

/// Canonical core syntax of `p`. Fixpoint binders always carry their sort.
pub fn print_pattern(sig: &Signature, p: &Pattern) -> String {
    let mut out = String::new();
    write_pattern(sig, p, &mut out);
    out
}

fn write_pattern(sig: &Signature, p: &Pattern, out: &mut String) {
    match p.kind() {
        PatternKind::FreeEVar(v) => {
            let _ = write!(out, "{}", sig.display_evar(v));
        }
        PatternKind::FreeSVar(v) => {
            let _ = write!(out, "{}", sig.display_svar(v));
        }
        PatternKind::BoundEVar(i) => {
            let _ = write!(out, "b{i}");
        }
        PatternKind::BoundSVar(i) => {
            let _ = write!(out, "B{i}");
        }
        PatternKind::App(sym, args) => {
            out.push_str(sig.symbol_name(*sym));
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_pattern(sig, a, out);
            }
            out.push(')');
        }
        PatternKind::Not(b) => {
            out.push_str("\\not(");
            write_pattern(sig, b, out);
            out.push(')');
        }
        PatternKind::And(l, r) => {
            out.push_str("\\and(");
            write_pattern(sig, l, out);
            out.push_str(", ");
            write_pattern(sig, r, out);
            out.push(')');
        }
        PatternKind::Exists(s, b) => {
            let _ = write!(out, "\\exists{{{}}} ", sig.sort_name(*s));
            write_pattern(sig, b, out);
        }
        PatternKind::Mu(b) => {
            let _ = write!(out, "\\mu{{{}}} ", sig.sort_name(b.sort()));
            write_pattern(sig, b, out);
        }
        PatternKind::Defined(b) => {
            let _ = write!(out, "\\ceil{{{}}}(", sig.sort_name(p.sort()));
            write_pattern(sig, b, out);
            out.push(')');
        }
    }
}
