use super::{Pattern, PatternKind};

/// Verdict for one `\mu` node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MuVerdict {
    /// Child indices leading from the root to the `\mu` node.
    pub path: Vec<usize>,
    /// The bound set variable occurs only under an even number of negations.
    pub positive: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PositivityReport {
    pub verdicts: Vec<MuVerdict>,
}

impl PositivityReport {
    pub fn is_positive(&self) -> bool {
        self.verdicts.iter().all(|v| v.positive)
    }

    pub fn negative(&self) -> impl Iterator<Item = &MuVerdict> {
        self.verdicts.iter().filter(|v| !v.positive)
    }
}

/// Check every `\mu` node of `p` for negative occurrences of its variable.
pub fn check_mu_positivity(p: &Pattern) -> PositivityReport {
    let mut report = PositivityReport::default();
    let mut path = Vec::new();
    walk(p, &mut path, &mut report);
    report
}

fn walk(p: &Pattern, path: &mut Vec<usize>, report: &mut PositivityReport) {
    if let PatternKind::Mu(body) = p.kind() {
        report.verdicts.push(MuVerdict { path: path.clone(), positive: !occurs_negatively(body, 0, false) });
    }
    for (i, c) in p.children().into_iter().enumerate() {
        path.push(i);
        walk(c, path, report);
        path.pop();
    }
}

fn occurs_negatively(p: &Pattern, level: usize, negated: bool) -> bool {
    match p.kind() {
        PatternKind::BoundSVar(i) => *i == level && negated,
        PatternKind::Not(b) => occurs_negatively(b, level, !negated),
        PatternKind::Mu(b) => occurs_negatively(b, level + 1, negated),
        _ => p.children().into_iter().any(|c| occurs_negatively(c, level, negated)),
    }
}
