use std::collections::{BTreeMap, BTreeSet};

use num_traits::ToPrimitive;
use serde_json::{json, Value};

use super::{AttrMatch, RewriteDomain, Side};
use crate::algebra::{
    evaluate, guard_eval, match_into, parse_term, sort_check, AlgTerm, CloudConfig, Signature, Sort, Valuation, BOOL,
};
use crate::attr::AttrDomain;

/// Rule variables and their sorts.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AlgObject {
    pub vars: BTreeMap<String, Sort>,
}

/// Many-sorted ground terms on nodes and edges; rules carry open terms and
/// boolean guards.
#[derive(Clone, Debug)]
pub struct AlgebraDomain {
    pub sig: Signature,
}

impl AlgebraDomain {
    pub fn new(sig: Signature) -> Self {
        Self { sig }
    }

    pub fn cloud() -> Self {
        Self::new(Signature::cloud())
    }

    fn typed(&self, v: &AlgTerm) -> Result<Sort, String> {
        let sort = sort_check(v, &self.sig).map_err(|e| e.to_string())?;
        if !self.sig.attribute_sorts.contains(&sort) {
            return Err(format!("sort {sort} cannot attribute graph elements"));
        }
        Ok(sort)
    }
}

impl AttrDomain for AlgebraDomain {
    type Value = AlgTerm;
    type Map = Valuation;

    fn apply(&self, map: &Valuation, v: &AlgTerm) -> Result<AlgTerm, String> {
        evaluate(v, &self.sig, map).map_err(|e| e.to_string())
    }
}

impl RewriteDomain for AlgebraDomain {
    type Object = AlgObject;

    fn name(&self) -> &'static str {
        "algebra"
    }

    /// `{"vars": {"c": "C", "n": "N"}, "constructors": [...]}`; the
    /// constructor declarations are read by the driver.
    fn parse_object(&self, json: Option<&Value>) -> Result<AlgObject, String> {
        let Some(json) = json else {
            return Ok(AlgObject::default());
        };
        let obj = json.as_object().ok_or("attribute object must be a JSON object")?;
        let mut vars = BTreeMap::new();
        if let Some(vs) = obj.get("vars") {
            let vs = vs.as_object().ok_or("vars must map names to sorts")?;
            for (name, sort) in vs {
                let sort = sort
                    .as_str()
                    .ok_or_else(|| format!("sort of {name} must be a string"))?;
                if !self.sig.sorts.contains(sort) {
                    return Err(format!("variable {name} has unknown sort {sort}"));
                }
                if self.sig.ops.contains_key(name) {
                    return Err(format!("variable {name} clashes with an operation"));
                }
                vars.insert(name.clone(), sort.to_string());
            }
        }
        Ok(AlgObject { vars })
    }

    fn object_to_json(&self, obj: &AlgObject) -> Value {
        json!({ "vars": obj.vars })
    }

    fn parse_value(&self, obj: &AlgObject, json: &Value) -> Result<AlgTerm, String> {
        match json {
            Value::Number(n) => n
                .as_u64()
                .map(AlgTerm::nat)
                .ok_or_else(|| format!("{n} is not a natural number")),
            Value::Bool(b) => Ok(AlgTerm::Bool(*b)),
            Value::Object(_) => CloudConfig::from_json(json)
                .map(|c| AlgTerm::Config(Box::new(c)))
                .map_err(|e| e.to_string()),
            Value::String(s) => parse_term(s, &self.sig, &obj.vars).map_err(|e| e.to_string()),
            other => Err(format!("cannot read an attribute from {other}")),
        }
    }

    fn value_to_json(&self, v: &AlgTerm) -> Value {
        match v {
            AlgTerm::Nat(n) => n.to_u64().map(|n| json!(n)).unwrap_or_else(|| json!(n.to_string())),
            AlgTerm::Bool(b) => json!(b),
            AlgTerm::Config(c) => c.to_json(),
            other => json!(other.to_string()),
        }
    }

    fn map_to_json(&self, map: &Valuation) -> Value {
        Value::Object(map.iter().map(|(k, t)| (k.clone(), self.value_to_json(t))).collect())
    }

    fn check_host_value(&self, _obj: &AlgObject, v: &AlgTerm) -> Result<(), String> {
        if !v.is_value(&self.sig) {
            return Err(format!("{v} is not a constructor value"));
        }
        if let AlgTerm::Config(c) = v {
            c.check_invariants().map_err(|e| e.to_string())?;
        }
        self.typed(v).map(|_| ())
    }

    fn check_rule_value(&self, _obj: &AlgObject, side: Side, v: &AlgTerm) -> Result<(), String> {
        self.typed(v)?;
        if side != Side::Right {
            if let Some(op) = v.defined_ops(&self.sig).into_iter().next() {
                return Err(format!("defined operation {op} cannot occur in a pattern"));
            }
        }
        Ok(())
    }

    fn check_guard(&self, _obj: &AlgObject, g: &AlgTerm) -> Result<(), String> {
        let s = sort_check(g, &self.sig).map_err(|e| e.to_string())?;
        if s != BOOL {
            return Err(format!("guard {g} has sort {s}, expected B"));
        }
        Ok(())
    }

    fn vars(&self, v: &AlgTerm) -> BTreeSet<String> {
        v.vars().into_keys().collect()
    }

    fn anchored_vars(&self, v: &AlgTerm) -> BTreeSet<String> {
        if v.defined_ops(&self.sig).is_empty() {
            self.vars(v)
        } else {
            BTreeSet::new()
        }
    }

    fn empty_map(&self) -> Valuation {
        Valuation::new()
    }

    fn match_attr(
        &self,
        _objs: (&AlgObject, &AlgObject),
        pattern: &AlgTerm,
        value: &AlgTerm,
        map: &mut Valuation,
    ) -> Result<AttrMatch, String> {
        match match_into(pattern, value, &self.sig, map) {
            Ok(true) => Ok(AttrMatch::Bound),
            Ok(false) => Ok(AttrMatch::Mismatch),
            Err(e) => Err(e.to_string()),
        }
    }

    fn check_deferred(
        &self,
        _objs: (&AlgObject, &AlgObject),
        pattern: &AlgTerm,
        value: &AlgTerm,
        map: &Valuation,
    ) -> Result<bool, String> {
        Ok(self.apply(map, pattern)? == *value)
    }

    fn guards_hold(&self, guards: &[AlgTerm], map: &Valuation) -> Result<bool, String> {
        guard_eval(guards, &self.sig, map).map_err(|e| e.to_string())
    }
}
