//! Fragment membership and the integer-guard discipline.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::formula::{Atom, Formula, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FragmentLabel {
    MsoOr,
    MsoIro,
    Lmix,
    RdlUup,
    Outside,
}

impl FragmentLabel {
    pub const ALL: [FragmentLabel; 5] = [
        FragmentLabel::MsoOr,
        FragmentLabel::MsoIro,
        FragmentLabel::Lmix,
        FragmentLabel::RdlUup,
        FragmentLabel::Outside,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FragmentLabel::MsoOr => "MSO_OR",
            FragmentLabel::MsoIro => "MSO_IRO",
            FragmentLabel::Lmix => "LMIX",
            FragmentLabel::RdlUup => "RDL_UUP",
            FragmentLabel::Outside => "OUTSIDE",
        }
    }
}

impl fmt::Display for FragmentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Why a formula falls outside a fragment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// The fragment this violation excludes.
    pub fragment: FragmentLabel,
    /// Offending atom.
    pub atom: Atom,
    /// Child indices from the root down to the atom.
    pub path: Vec<usize>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "not {}: {} at {}", self.fragment, self.message, self.atom)?;
        if !self.path.is_empty() {
            let path: Vec<String> = self.path.iter().map(|i| i.to_string()).collect();
            write!(f, " (path {})", path.join("."))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassificationReport {
    /// Every fragment containing the formula, or just `Outside`.
    pub best_labels: BTreeSet<FragmentLabel>,
    pub violations: Vec<Violation>,
}

impl ClassificationReport {
    pub fn contains(&self, label: FragmentLabel) -> bool {
        self.best_labels.contains(&label)
    }

    /// Labels joined with `, `.
    pub fn labels_line(&self) -> String {
        self.best_labels.iter().map(|l| l.name()).collect::<Vec<_>>().join(", ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("shorthand atom {0} must be expanded before classification")]
    Shorthand(Atom),
}

fn find_shorthand(f: &Formula) -> Option<Atom> {
    let mut found = None;
    f.for_each_atom(&mut |a| {
        if found.is_none() && matches!(a, Atom::PredOffset { .. }) {
            found = Some(a.clone());
        }
    });
    found
}

/// Computes every fragment the formula belongs to.
pub fn classify(f: &Formula) -> Result<ClassificationReport, ClassifyError> {
    if let Some(a) = find_shorthand(f) {
        return Err(ClassifyError::Shorthand(a));
    }
    let mut has_diff = false;
    let mut has_int = false;
    f.for_each_atom(&mut |a| match a {
        Atom::Diff { .. } => has_diff = true,
        Atom::IsInt(_) => has_int = true,
        _ => {}
    });
    let (guarded, mut violations) = is_well_guarded(f);

    let mut labels = BTreeSet::new();
    if !has_diff && !has_int {
        labels.insert(FragmentLabel::MsoOr);
    }
    if !has_diff {
        labels.insert(FragmentLabel::MsoIro);
    }
    if guarded {
        labels.insert(FragmentLabel::Lmix);
    }
    if !has_int {
        labels.insert(FragmentLabel::RdlUup);
    } else {
        collect_int_violations(f, &mut Vec::new(), &mut violations);
    }
    if labels.is_empty() {
        labels.insert(FragmentLabel::Outside);
    }
    Ok(ClassificationReport { best_labels: labels, violations })
}

fn collect_int_violations(f: &Formula, path: &mut Vec<usize>, out: &mut Vec<Violation>) {
    match f {
        Formula::Atom(a @ Atom::IsInt(_)) => out.push(Violation {
            fragment: FragmentLabel::RdlUup,
            atom: a.clone(),
            path: path.clone(),
            message: "integer guard".into(),
        }),
        _ => {
            for (i, c) in f.children().into_iter().enumerate() {
                path.push(i);
                collect_int_violations(c, path, out);
                path.pop();
            }
        }
    }
}

/// Checks that every difference atom sits in a guarded context.
///
/// A difference atom over `x, y` is accepted when a flattened conjunction
/// containing it also contains `int x` and `int y`, or when it (or such a
/// conjunction) is the consequent of an implication whose flattened
/// antecedent supplies the missing guards. Guards are only looked up in
/// that node; enclosing scopes do not count.
pub fn is_well_guarded(f: &Formula) -> (bool, Vec<Violation>) {
    let mut out = Vec::new();
    walk(f, &BTreeSet::new(), &mut Vec::new(), &mut out);
    (out.is_empty(), out)
}

/// Leaves of a nested conjunction paired with their paths.
fn flatten_and<'a>(f: &'a Formula, path: &mut Vec<usize>, out: &mut Vec<(&'a Formula, Vec<usize>)>) {
    match f {
        Formula::And(gs) => {
            for (i, g) in gs.iter().enumerate() {
                path.push(i);
                flatten_and(g, path, out);
                path.pop();
            }
        }
        _ => out.push((f, path.clone())),
    }
}

fn guards_in<'a>(items: impl IntoIterator<Item = &'a Formula>) -> BTreeSet<Var> {
    items
        .into_iter()
        .filter_map(|g| match g {
            Formula::Atom(Atom::IsInt(v)) => Some(v.clone()),
            _ => None,
        })
        .collect()
}

fn check_diff(a: &Atom, guards: &BTreeSet<Var>, path: &[usize], out: &mut Vec<Violation>) {
    if let Atom::Diff { lhs, rhs, .. } = a {
        let mut missing: Vec<&Var> = Vec::new();
        for v in [lhs, rhs] {
            if !guards.contains(v) && !missing.contains(&v) {
                missing.push(v);
            }
        }
        if !missing.is_empty() {
            let names: Vec<&str> = missing.iter().map(|v| v.as_str()).collect();
            out.push(Violation {
                fragment: FragmentLabel::Lmix,
                atom: a.clone(),
                path: path.to_vec(),
                message: format!("difference atom lacks integer guard for {}", names.join(", ")),
            });
        }
    }
}

/// `inherited` holds guards from an enclosing implication antecedent and is
/// only non-empty when `f` is that implication's consequent.
fn walk(f: &Formula, inherited: &BTreeSet<Var>, path: &mut Vec<usize>, out: &mut Vec<Violation>) {
    match f {
        Formula::Atom(a @ Atom::Diff { .. }) => check_diff(a, inherited, path, out),
        Formula::Atom(_) => {}
        Formula::And(_) => {
            let mut leaves = Vec::new();
            flatten_and(f, &mut Vec::new(), &mut leaves);
            let mut guards = guards_in(leaves.iter().map(|(g, _)| *g));
            guards.extend(inherited.iter().cloned());
            let base = path.len();
            for (g, sub) in leaves {
                path.extend(sub);
                match g {
                    Formula::Atom(a @ Atom::Diff { .. }) => check_diff(a, &guards, path, out),
                    _ => walk(g, &BTreeSet::new(), path, out),
                }
                path.truncate(base);
            }
        }
        Formula::Implies(ante, cons) => {
            path.push(0);
            walk(ante, &BTreeSet::new(), path, out);
            path.pop();
            let mut leaves = Vec::new();
            flatten_and(ante, &mut Vec::new(), &mut leaves);
            let guards = guards_in(leaves.iter().map(|(g, _)| *g));
            path.push(1);
            walk(cons, &guards, path, out);
            path.pop();
        }
        _ => {
            for (i, c) in f.children().into_iter().enumerate() {
                path.push(i);
                walk(c, &BTreeSet::new(), path, out);
                path.pop();
            }
        }
    }
}
