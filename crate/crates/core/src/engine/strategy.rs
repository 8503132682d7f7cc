use std::collections::BTreeMap;
use std::sync::Arc;

use super::{apply_rewrite, first_match, EngineError, Host, RewriteDomain, RewriteTrace, Rule};
use crate::attr::AttrGraph;

/// Something a strategy can drive: a current state and a list of rules.
pub trait RewriteSystem {
    fn rule_count(&self) -> usize;
    /// Applies rule `rule` at its first match; `false` when it has none.
    fn try_step(&mut self, rule: usize) -> Result<bool, EngineError>;
    /// Whether rule `rule` has a match, without applying it.
    fn applicable(&mut self, rule: usize) -> Result<bool, EngineError>;
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunSummary {
    pub steps: usize,
    /// The step budget ran out while some rule was still applicable.
    pub exhausted: bool,
}

pub trait Strategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn run(&self, sys: &mut dyn RewriteSystem, max_steps: usize) -> Result<RunSummary, EngineError>;
}

/// Repeatedly the first rule in list order that has a match, at its first match.
pub struct FirstMatch;

impl Strategy for FirstMatch {
    fn name(&self) -> &'static str {
        "first-match"
    }

    fn run(&self, sys: &mut dyn RewriteSystem, max_steps: usize) -> Result<RunSummary, EngineError> {
        let mut steps = 0;
        loop {
            let mut applied = false;
            if steps == max_steps {
                return Ok(RunSummary {
                    steps,
                    exhausted: applicable_somewhere(sys)?,
                });
            }
            for i in 0..sys.rule_count() {
                if sys.try_step(i)? {
                    applied = true;
                    break;
                }
            }
            if !applied {
                return Ok(RunSummary {
                    steps,
                    exhausted: false,
                });
            }
            steps += 1;
        }
    }
}

/// One pass over the rules in order, applying each as long as it matches.
pub struct AllMatchesSequential;

impl Strategy for AllMatchesSequential {
    fn name(&self) -> &'static str {
        "all-matches-sequential"
    }

    fn run(&self, sys: &mut dyn RewriteSystem, max_steps: usize) -> Result<RunSummary, EngineError> {
        let mut steps = 0;
        for i in 0..sys.rule_count() {
            loop {
                if steps == max_steps {
                    return Ok(RunSummary {
                        steps,
                        exhausted: applicable_from(sys, i)?,
                    });
                }
                if !sys.try_step(i)? {
                    break;
                }
                steps += 1;
            }
        }
        Ok(RunSummary {
            steps,
            exhausted: false,
        })
    }
}

/// Passes of [`AllMatchesSequential`] until no rule matches.
pub struct Fixpoint;

impl Strategy for Fixpoint {
    fn name(&self) -> &'static str {
        "fixpoint"
    }

    fn run(&self, sys: &mut dyn RewriteSystem, max_steps: usize) -> Result<RunSummary, EngineError> {
        let mut steps = 0;
        loop {
            let mut progressed = false;
            for i in 0..sys.rule_count() {
                loop {
                    if steps == max_steps {
                        return Ok(RunSummary {
                            steps,
                            exhausted: applicable_somewhere(sys)?,
                        });
                    }
                    if !sys.try_step(i)? {
                        break;
                    }
                    steps += 1;
                    progressed = true;
                }
            }
            if !progressed {
                return Ok(RunSummary {
                    steps,
                    exhausted: false,
                });
            }
        }
    }
}

fn applicable_somewhere(sys: &mut dyn RewriteSystem) -> Result<bool, EngineError> {
    applicable_from(sys, 0)
}

fn applicable_from(sys: &mut dyn RewriteSystem, from: usize) -> Result<bool, EngineError> {
    for i in from..sys.rule_count() {
        if sys.applicable(i)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Strategies by name.
pub struct StrategyRegistry {
    entries: BTreeMap<&'static str, Arc<dyn Strategy>>,
}

impl StrategyRegistry {
    pub fn empty() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }

    pub fn standard() -> Self {
        let mut reg = Self::empty();
        reg.register(Arc::new(FirstMatch));
        reg.register(Arc::new(AllMatchesSequential));
        reg.register(Arc::new(Fixpoint));
        reg
    }

    pub fn register(&mut self, s: Arc<dyn Strategy>) {
        self.entries.insert(s.name(), s);
    }

    pub fn get(&self, name: &str) -> Option<Arc<dyn Strategy>> {
        self.entries.get(name).cloned()
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }
}

/// A host graph being rewritten by a fixed rule list; records every step.
pub struct Session<'a, D: RewriteDomain> {
    domain: &'a D,
    rules: &'a [Rule<D>],
    current: Host<D>,
    traces: Vec<RewriteTrace<D>>,
}

impl<'a, D: RewriteDomain> Session<'a, D> {
    pub fn new(domain: &'a D, rules: &'a [Rule<D>], host: &Host<D>) -> Self {
        Self {
            domain,
            rules,
            current: host.clone(),
            traces: Vec::new(),
        }
    }

    pub fn current(&self) -> &AttrGraph<D::Value> {
        &self.current.graph
    }

    pub fn traces(&self) -> &[RewriteTrace<D>] {
        &self.traces
    }

    pub fn into_parts(self) -> (AttrGraph<D::Value>, Vec<RewriteTrace<D>>) {
        (self.current.graph, self.traces)
    }
}

impl<D: RewriteDomain> RewriteSystem for Session<'_, D> {
    fn rule_count(&self) -> usize {
        self.rules.len()
    }

    fn try_step(&mut self, rule: usize) -> Result<bool, EngineError> {
        let rule = &self.rules[rule];
        let Some(m) = first_match(self.domain, &self.current, rule)? else {
            return Ok(false);
        };
        let trace = apply_rewrite(self.domain, &self.current, rule, &m)?;
        self.current.graph = trace.h().clone();
        self.traces.push(trace);
        Ok(true)
    }

    fn applicable(&mut self, rule: usize) -> Result<bool, EngineError> {
        Ok(first_match(self.domain, &self.current, &self.rules[rule])?.is_some())
    }
}

/// Runs `strategy` from `host`; returns the steps taken and the summary.
pub fn run_strategy<D: RewriteDomain>(
    domain: &D,
    host: &Host<D>,
    rules: &[Rule<D>],
    strategy: &dyn Strategy,
    max_steps: usize,
) -> Result<(Vec<RewriteTrace<D>>, RunSummary), EngineError> {
    let mut session = Session::new(domain, rules, host);
    let summary = strategy.run(&mut session, max_steps)?;
    Ok((session.into_parts().1, summary))
}
