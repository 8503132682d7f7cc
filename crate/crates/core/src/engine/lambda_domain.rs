use std::collections::BTreeSet;

use serde_json::{json, Map, Value};

use super::{AttrMatch, RewriteDomain, Side};
use crate::attr::AttrDomain;
use crate::graph::Elem;
use crate::lambda::{
    normalize_with_budget, parse_term_in, parse_type, substitute_unchecked, typecheck, Substitution, Term, TypeContext,
    DEFAULT_STEP_BUDGET,
};

/// Simply typed λ-terms in normal form on nodes. Edges carry no attribute.
///
/// Rule attributes may contain the rule variables declared in the rule's
/// object; host attributes may contain the constants declared in the host's
/// object. A match binds each bare variable of the left-hand side to a host
/// term of the declared type. Right-hand attributes are instantiated and
/// normalized; it is the normal form that must be well typed, not the
/// right-hand term itself.
#[derive(Clone, Debug)]
pub struct LambdaDomain {
    pub budget: usize,
}

impl Default for LambdaDomain {
    fn default() -> Self {
        Self {
            budget: DEFAULT_STEP_BUDGET,
        }
    }
}

impl AttrDomain for LambdaDomain {
    type Value = Term;
    type Map = Substitution;

    fn apply(&self, map: &Substitution, v: &Term) -> Result<Term, String> {
        normalize_with_budget(&substitute_unchecked(v, map), self.budget).map_err(|e| e.to_string())
    }

    fn attributable(&self, x: &Elem) -> bool {
        matches!(x, Elem::Node(_))
    }
}

impl RewriteDomain for LambdaDomain {
    type Object = TypeContext;

    fn name(&self) -> &'static str {
        "lambda"
    }

    /// `{"vars": {"x": "i", "f": "i->i"}}`; absent means empty.
    fn parse_object(&self, json: Option<&Value>) -> Result<TypeContext, String> {
        let Some(json) = json else {
            return Ok(TypeContext::new());
        };
        let obj = json.as_object().ok_or("attribute object must be a JSON object")?;
        let mut ctx = TypeContext::new();
        if let Some(vars) = obj.get("vars") {
            let vars = vars.as_object().ok_or("vars must map names to types")?;
            for (name, ty) in vars {
                let ty = ty.as_str().ok_or_else(|| format!("type of {name} must be a string"))?;
                ctx.insert(
                    name.clone(),
                    parse_type(ty).map_err(|e| format!("type of {name}: {e}"))?,
                );
            }
        }
        Ok(ctx)
    }

    fn object_to_json(&self, obj: &TypeContext) -> Value {
        let vars: Map<String, Value> = obj.iter().map(|(k, t)| (k.clone(), json!(t.to_string()))).collect();
        json!({ "vars": vars })
    }

    fn parse_value(&self, obj: &TypeContext, json: &Value) -> Result<Term, String> {
        let src = json.as_str().ok_or("λ attributes are written as strings")?;
        parse_term_in(src, obj).map_err(|e| e.to_string())
    }

    fn value_to_json(&self, v: &Term) -> Value {
        json!(v.to_string())
    }

    fn map_to_json(&self, map: &Substitution) -> Value {
        Value::Object(map.iter().map(|(k, t)| (k.clone(), json!(t.to_string()))).collect())
    }

    fn check_host_value(&self, obj: &TypeContext, v: &Term) -> Result<(), String> {
        typecheck(v, obj).map_err(|e| e.to_string())?;
        if !v.is_normal() {
            return Err(format!("{v} is not in normal form"));
        }
        Ok(())
    }

    fn check_rule_value(&self, obj: &TypeContext, side: Side, v: &Term) -> Result<(), String> {
        if side == Side::Right {
            return Ok(());
        }
        typecheck(v, obj).map_err(|e| e.to_string())?;
        if !v.is_normal() {
            return Err(format!("{v} is not in normal form"));
        }
        Ok(())
    }

    fn check_guard(&self, _obj: &TypeContext, _g: &Term) -> Result<(), String> {
        Err("the lambda domain has no guards".into())
    }

    fn vars(&self, v: &Term) -> BTreeSet<String> {
        v.free_vars()
    }

    fn anchored_vars(&self, v: &Term) -> BTreeSet<String> {
        v.as_free().map(|x| BTreeSet::from([x.to_string()])).unwrap_or_default()
    }

    fn empty_map(&self) -> Substitution {
        Substitution::new()
    }

    fn match_attr(
        &self,
        (rule_ctx, host_ctx): (&TypeContext, &TypeContext),
        pattern: &Term,
        value: &Term,
        map: &mut Substitution,
    ) -> Result<AttrMatch, String> {
        if let Some(x) = pattern.as_free() {
            if let Some(bound) = map.get(x) {
                return Ok(if bound == value {
                    AttrMatch::Bound
                } else {
                    AttrMatch::Mismatch
                });
            }
            let declared = rule_ctx.get(x).ok_or_else(|| format!("undeclared rule variable {x}"))?;
            let found = typecheck(value, host_ctx).map_err(|e| e.to_string())?;
            if found != *declared {
                return Ok(AttrMatch::Mismatch);
            }
            map.insert(x.to_string(), value.clone());
            return Ok(AttrMatch::Bound);
        }
        if pattern.free_vars().is_empty() {
            return Ok(if pattern == value {
                AttrMatch::Bound
            } else {
                AttrMatch::Mismatch
            });
        }
        Ok(AttrMatch::Deferred)
    }

    fn check_deferred(
        &self,
        _objs: (&TypeContext, &TypeContext),
        pattern: &Term,
        value: &Term,
        map: &Substitution,
    ) -> Result<bool, String> {
        Ok(self.apply(map, pattern)? == *value)
    }

    fn guards_hold(&self, guards: &[Term], _map: &Substitution) -> Result<bool, String> {
        if guards.is_empty() {
            Ok(true)
        } else {
            Err("the lambda domain has no guards".into())
        }
    }
}
