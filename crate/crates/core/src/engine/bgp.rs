use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::rdf::{Graph, Iri, Term, TermPattern, Variable};
use crate::sparql::TriplePattern;

/// Variable bindings in tabular form. Each row holds one term per entry of
/// `vars`, in the same order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionTable {
    pub vars: Vec<Variable>,
    pub rows: Vec<Vec<Term>>,
}

impl SolutionTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column_index(&self, var: &Variable) -> Option<usize> {
        self.vars.iter().position(|v| v == var)
    }

    /// Distinct values bound to `var`.
    pub fn column(&self, var: &Variable) -> BTreeSet<Term> {
        match self.column_index(var) {
            Some(i) => self.rows.iter().map(|r| r[i].clone()).collect(),
            None => BTreeSet::new(),
        }
    }

    /// Rows as a set, for order-insensitive comparison.
    pub fn row_set(&self) -> BTreeSet<Vec<Term>> {
        self.rows.iter().cloned().collect()
    }

    /// Keeps `vars` (in that order); duplicates produced by dropping columns
    /// are kept.
    pub fn project(&self, vars: &[Variable]) -> SolutionTable {
        let idx: Vec<Option<usize>> = vars.iter().map(|v| self.column_index(v)).collect();
        let rows = self
            .rows
            .iter()
            .filter_map(|row| {
                idx.iter()
                    .map(|i| i.map(|i| row[i].clone()))
                    .collect::<Option<Vec<_>>>()
            })
            .collect();
        SolutionTable {
            vars: vars.to_vec(),
            rows,
        }
    }

    /// Sorts rows lexicographically by the N-Triples text of their terms.
    pub fn sort(&mut self) {
        self.rows
            .sort_by_cached_key(|row| row.iter().map(Term::to_string).collect::<Vec<_>>());
    }

    /// Drops repeated rows; expects sorted rows.
    pub fn dedup(&mut self) {
        self.rows.dedup();
    }

    pub fn truncate(&mut self, limit: usize) {
        self.rows.truncate(limit);
    }
}

/// Fixed-width text table, one header line then one line per row.
impl fmt::Display for SolutionTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let header: Vec<String> = self.vars.iter().map(Variable::to_string).collect();
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(Term::to_string).collect())
            .collect();
        let widths: Vec<usize> = (0..header.len())
            .map(|i| {
                cells
                    .iter()
                    .map(|r| r[i].chars().count())
                    .chain([header[i].chars().count()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |f: &mut fmt::Formatter<'_>, row: &[String]| -> fmt::Result {
            let mut text = String::new();
            for (i, cell) in row.iter().enumerate() {
                if i + 1 == row.len() {
                    text.push_str(cell);
                } else {
                    text.push_str(&format!("{cell:<w$}  ", w = widths[i]));
                }
            }
            writeln!(f, "{}", text.trim_end())
        };
        line(f, &header)?;
        for row in &cells {
            line(f, row)?;
        }
        Ok(())
    }
}

type Binding = BTreeMap<Variable, Term>;

fn resolve<'a>(tp: &'a TermPattern, binding: &'a Binding) -> Option<&'a Term> {
    match tp {
        TermPattern::Term(t) => Some(t),
        TermPattern::Variable(v) => binding.get(v),
    }
}

/// Binds `tp` to `value`, failing on a conflicting earlier binding (this
/// covers variables repeated within one pattern).
fn unify(tp: &TermPattern, value: Term, binding: &mut Binding) -> bool {
    match tp {
        TermPattern::Term(t) => *t == value,
        TermPattern::Variable(v) => match binding.get(v) {
            Some(existing) => *existing == value,
            None => {
                binding.insert(v.clone(), value);
                true
            }
        },
    }
}

/// Evaluates a basic graph pattern by left-to-right nested-loop join, each
/// pattern answered by one index lookup per partial solution. Columns are
/// the variables in order of first occurrence. An empty pattern list yields
/// a single empty row.
pub fn evaluate_bgp(store: &Graph, patterns: &[TriplePattern]) -> SolutionTable {
    let mut vars: Vec<Variable> = Vec::new();
    for v in patterns.iter().flat_map(TriplePattern::variables) {
        if !vars.contains(v) {
            vars.push(v.clone());
        }
    }

    let mut solutions: Vec<Binding> = vec![Binding::new()];
    for pattern in patterns {
        let mut next = Vec::new();
        for binding in &solutions {
            let s = resolve(&pattern.subject, binding);
            let p = resolve(&pattern.predicate, binding);
            let o = resolve(&pattern.object, binding);
            // Only IRIs can occupy subject and predicate positions.
            let s_iri = match s {
                Some(Term::Iri(i)) => Some(i),
                Some(_) => continue,
                None => None,
            };
            let p_iri: Option<&Iri> = match p {
                Some(Term::Iri(i)) => Some(i),
                Some(_) => continue,
                None => None,
            };
            for triple in store.matching(s_iri, p_iri, o) {
                let mut extended = binding.clone();
                if unify(&pattern.subject, Term::Iri(triple.subject), &mut extended)
                    && unify(&pattern.predicate, Term::Iri(triple.predicate), &mut extended)
                    && unify(&pattern.object, triple.object, &mut extended)
                {
                    next.push(extended);
                }
            }
        }
        solutions = next;
        if solutions.is_empty() {
            break;
        }
    }

    let rows = solutions
        .into_iter()
        .map(|mut b| {
            vars.iter()
                .map(|v| b.remove(v).expect("every variable bound"))
                .collect()
        })
        .collect();
    SolutionTable { vars, rows }
}
