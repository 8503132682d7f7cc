//! Executable stand-in for the cloud administrator's configuration record.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Map, Value};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Machine {
    pub size: BigUint,
    pub free: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vm {
    pub size: BigUint,
    pub vmtype: String,
    /// Machines hosting a copy.
    pub replicas: BTreeSet<BigUint>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CloudConfig {
    pub machines: BTreeMap<BigUint, Machine>,
    pub vms: BTreeMap<BigUint, Vm>,
    pub load_threshold: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("machine {0} is unknown")]
    UnknownMachine(BigUint),
    #[error("virtual machine {0} is unknown")]
    UnknownVm(BigUint),
    #[error("identifier {0} is already in use")]
    IdInUse(BigUint),
    #[error("machine {machine} has {free} free, {needed} needed")]
    NoSpace {
        machine: BigUint,
        free: BigUint,
        needed: BigUint,
    },
    #[error("machine {0} has more free space than size")]
    FreeExceedsSize(BigUint),
    #[error("a new machine must be empty")]
    NewMachineNotEmpty,
    #[error("virtual machine {vm} is hosted by unknown machine {machine}")]
    DanglingHost { vm: BigUint, machine: BigUint },
    #[error("virtual machine {0} has no host")]
    Unhosted(BigUint),
    #[error("virtual machine {vm} already runs on machine {machine}")]
    AlreadyHosted { vm: BigUint, machine: BigUint },
    #[error("cannot merge machine {0} into itself")]
    SelfMerge(BigUint),
    #[error("malformed configuration: {0}")]
    Malformed(String),
}

fn nat_json(n: &BigUint) -> Value {
    match n.to_u64() {
        Some(v) => json!(v),
        None => Value::String(n.to_string()),
    }
}

fn nat_from(v: &Value, what: &str) -> Result<BigUint, ConfigError> {
    match v {
        Value::Number(n) => n
            .as_u64()
            .map(BigUint::from)
            .ok_or_else(|| ConfigError::Malformed(format!("{what} is not a natural number"))),
        Value::String(s) => s
            .parse()
            .map_err(|_| ConfigError::Malformed(format!("{what} is not a natural number"))),
        _ => Err(ConfigError::Malformed(format!("{what} is not a natural number"))),
    }
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, ctx: &str) -> Result<&'a Value, ConfigError> {
    obj.get(key)
        .ok_or_else(|| ConfigError::Malformed(format!("{ctx} lacks \"{key}\"")))
}

impl CloudConfig {
    pub fn check_invariants(&self) -> Result<(), ConfigError> {
        for (id, m) in &self.machines {
            if m.free > m.size {
                return Err(ConfigError::FreeExceedsSize(id.clone()));
            }
        }
        for (id, vm) in &self.vms {
            if vm.replicas.is_empty() {
                return Err(ConfigError::Unhosted(id.clone()));
            }
            if let Some(h) = vm.replicas.iter().find(|h| !self.machines.contains_key(*h)) {
                return Err(ConfigError::DanglingHost {
                    vm: id.clone(),
                    machine: h.clone(),
                });
            }
        }
        Ok(())
    }

    fn machine_mut(&mut self, id: &BigUint) -> Result<&mut Machine, ConfigError> {
        self.machines
            .get_mut(id)
            .ok_or_else(|| ConfigError::UnknownMachine(id.clone()))
    }

    fn take_space(&mut self, mid: &BigUint, needed: &BigUint) -> Result<(), ConfigError> {
        let m = self.machine_mut(mid)?;
        if m.free < *needed {
            return Err(ConfigError::NoSpace {
                machine: mid.clone(),
                free: m.free.clone(),
                needed: needed.clone(),
            });
        }
        m.free -= needed;
        Ok(())
    }

    /// The identifier is not used by any virtual machine.
    pub fn new_id(&self, id: &BigUint) -> bool {
        !self.vms.contains_key(id)
    }

    pub fn enough_space(&self, n: &BigUint) -> bool {
        self.machines.values().any(|m| m.free >= *n)
    }

    pub fn new_vm(&self, id: &BigUint, size: &BigUint, mid: &BigUint, vmtype: &str) -> Result<Self, ConfigError> {
        if !self.new_id(id) {
            return Err(ConfigError::IdInUse(id.clone()));
        }
        let mut c = self.clone();
        c.take_space(mid, size)?;
        c.vms.insert(
            id.clone(),
            Vm {
                size: size.clone(),
                vmtype: vmtype.to_string(),
                replicas: [mid.clone()].into(),
            },
        );
        Ok(c)
    }

    /// A further copy of a virtual machine on machine `mid`.
    pub fn repl_vm(&self, id: &BigUint, mid: &BigUint) -> Result<Self, ConfigError> {
        let vm = self.vms.get(id).ok_or_else(|| ConfigError::UnknownVm(id.clone()))?;
        if vm.replicas.contains(mid) {
            return Err(ConfigError::AlreadyHosted {
                vm: id.clone(),
                machine: mid.clone(),
            });
        }
        let size = vm.size.clone();
        let mut c = self.clone();
        c.take_space(mid, &size)?;
        c.vms.get_mut(id).expect("checked").replicas.insert(mid.clone());
        Ok(c)
    }

    /// Adds an empty machine; `free` must equal `size`.
    pub fn new_mch(&self, id: &BigUint, size: &BigUint, free: &BigUint) -> Result<Self, ConfigError> {
        if self.machines.contains_key(id) {
            return Err(ConfigError::IdInUse(id.clone()));
        }
        if free != size {
            return Err(ConfigError::NewMachineNotEmpty);
        }
        let mut c = self.clone();
        c.machines.insert(
            id.clone(),
            Machine {
                size: size.clone(),
                free: free.clone(),
            },
        );
        Ok(c)
    }

    /// Removes machine `from`, moving its virtual machines onto `into`.
    pub fn merge_mch(&self, from: &BigUint, into: &BigUint) -> Result<Self, ConfigError> {
        if from == into {
            return Err(ConfigError::SelfMerge(from.clone()));
        }
        let mut c = self.clone();
        let gone = c
            .machines
            .remove(from)
            .ok_or_else(|| ConfigError::UnknownMachine(from.clone()))?;
        let used = &gone.size - &gone.free;
        c.take_space(into, &used)?;
        for vm in c.vms.values_mut() {
            if vm.replicas.remove(from) {
                vm.replicas.insert(into.clone());
            }
        }
        Ok(c)
    }

    pub fn replicate_adm(&self) -> bool {
        BigUint::from(self.vms.len()) > self.load_threshold
    }

    /// After the administrator is copied each copy carries half the load,
    /// so the replication threshold becomes `2t + 1`.
    pub fn share_load(&self) -> Self {
        let mut c = self.clone();
        c.load_threshold = &c.load_threshold * 2u32 + BigUint::one();
        c
    }

    /// One more than the largest machine identifier.
    pub fn fresh_mch(&self) -> BigUint {
        self.machines
            .keys()
            .next_back()
            .map_or_else(BigUint::one, |m| m + BigUint::one())
    }

    pub fn is_host(&self, vm: &BigUint, mid: &BigUint) -> bool {
        self.vms.get(vm).is_some_and(|v| v.replicas.contains(mid))
    }

    pub fn to_json(&self) -> Value {
        let machines: Vec<Value> = self
            .machines
            .iter()
            .map(|(id, m)| json!({"id": nat_json(id), "size": nat_json(&m.size), "free": nat_json(&m.free)}))
            .collect();
        let vms: Vec<Value> = self
            .vms
            .iter()
            .map(|(id, v)| {
                json!({
                    "id": nat_json(id),
                    "size": nat_json(&v.size),
                    "vmtype": v.vmtype,
                    "replicas": v.replicas.iter().map(nat_json).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({"machines": machines, "vms": vms, "load_threshold": nat_json(&self.load_threshold)})
    }

    pub fn from_json(v: &Value) -> Result<Self, ConfigError> {
        let obj = v
            .as_object()
            .ok_or_else(|| ConfigError::Malformed("configuration is not an object".into()))?;
        let mut c = CloudConfig::default();
        let list = |key: &str| -> Result<Vec<Value>, ConfigError> {
            match obj.get(key) {
                None => Ok(Vec::new()),
                Some(Value::Array(a)) => Ok(a.clone()),
                Some(_) => Err(ConfigError::Malformed(format!("\"{key}\" is not a list"))),
            }
        };
        for m in list("machines")? {
            let m = m
                .as_object()
                .ok_or_else(|| ConfigError::Malformed("machine entry is not an object".into()))?;
            let id = nat_from(field(m, "id", "machine")?, "machine id")?;
            let size = nat_from(field(m, "size", "machine")?, "machine size")?;
            let free = match m.get("free") {
                Some(f) => nat_from(f, "machine free")?,
                None => size.clone(),
            };
            if c.machines.insert(id.clone(), Machine { size, free }).is_some() {
                return Err(ConfigError::IdInUse(id));
            }
        }
        for vm in list("vms")? {
            let vm = vm
                .as_object()
                .ok_or_else(|| ConfigError::Malformed("vm entry is not an object".into()))?;
            let id = nat_from(field(vm, "id", "vm")?, "vm id")?;
            let size = nat_from(field(vm, "size", "vm")?, "vm size")?;
            let vmtype = field(vm, "vmtype", "vm")?
                .as_str()
                .ok_or_else(|| ConfigError::Malformed("vmtype is not a string".into()))?
                .to_string();
            let replicas = match field(vm, "replicas", "vm")? {
                Value::Array(a) => a
                    .iter()
                    .map(|r| nat_from(r, "replica"))
                    .collect::<Result<BTreeSet<_>, _>>()?,
                _ => return Err(ConfigError::Malformed("replicas is not a list".into())),
            };
            if c.vms.insert(id.clone(), Vm { size, vmtype, replicas }).is_some() {
                return Err(ConfigError::IdInUse(id));
            }
        }
        c.load_threshold = match obj.get("load_threshold") {
            Some(t) => nat_from(t, "load_threshold")?,
            None => BigUint::zero(),
        };
        c.check_invariants()?;
        Ok(c)
    }
}

impl fmt::Display for CloudConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(v: u32) -> BigUint {
        BigUint::from(v)
    }

    fn one_machine() -> CloudConfig {
        CloudConfig::from_json(&json!({"machines":[{"id":1,"size":100,"free":100}],"vms":[],"load_threshold":1}))
            .unwrap()
    }

    #[test]
    fn json_round_trip() {
        let c = one_machine().new_vm(&n(3), &n(30), &n(1), "T1").unwrap();
        assert_eq!(CloudConfig::from_json(&c.to_json()).unwrap(), c);
        let big: BigUint = "123456789012345678901234567890".parse().unwrap();
        let mut c2 = c.clone();
        c2.load_threshold = big.clone();
        let back = CloudConfig::from_json(&c2.to_json()).unwrap();
        assert_eq!(back.load_threshold, big);
    }

    #[test]
    fn new_vm_takes_space_and_id() {
        let c = one_machine();
        assert!(c.new_id(&n(7)));
        let c = c.new_vm(&n(7), &n(30), &n(1), "T1").unwrap();
        assert!(!c.new_id(&n(7)));
        assert_eq!(c.machines[&n(1)].free, n(70));
        assert_eq!(c.new_vm(&n(7), &n(1), &n(1), "T1"), Err(ConfigError::IdInUse(n(7))));
        assert!(matches!(
            c.new_vm(&n(8), &n(71), &n(1), "T1"),
            Err(ConfigError::NoSpace { .. })
        ));
        c.check_invariants().unwrap();
    }

    #[test]
    fn merge_rehosts() {
        let c = one_machine()
            .new_mch(&n(2), &n(50), &n(50))
            .unwrap()
            .new_vm(&n(5), &n(20), &n(2), "T2")
            .unwrap();
        let m = c.merge_mch(&n(2), &n(1)).unwrap();
        assert_eq!(m.machines.len(), 1);
        assert_eq!(m.machines[&n(1)].free, n(80));
        assert!(m.is_host(&n(5), &n(1)));
        m.check_invariants().unwrap();
        assert_eq!(c.merge_mch(&n(1), &n(1)), Err(ConfigError::SelfMerge(n(1))));
    }

    #[test]
    fn replication_and_threshold() {
        let c = one_machine().new_mch(&n(2), &n(50), &n(50)).unwrap();
        let c = c.new_vm(&n(1), &n(10), &n(1), "T1").unwrap();
        assert!(!c.replicate_adm());
        let c = c.repl_vm(&n(1), &n(2)).unwrap();
        assert_eq!(c.machines[&n(2)].free, n(40));
        assert!(matches!(
            c.repl_vm(&n(1), &n(2)),
            Err(ConfigError::AlreadyHosted { .. })
        ));
        let c = c.new_vm(&n(2), &n(10), &n(1), "T1").unwrap();
        assert!(c.replicate_adm());
        assert!(!c.share_load().replicate_adm());
        assert_eq!(c.fresh_mch(), n(3));
        assert_eq!(CloudConfig::default().fresh_mch(), n(1));
    }

    #[test]
    fn invariants_reject_bad_configs() {
        let bad = json!({"machines":[{"id":1,"size":10,"free":11}]});
        assert_eq!(CloudConfig::from_json(&bad), Err(ConfigError::FreeExceedsSize(n(1))));
        let dangling = json!({"machines":[],"vms":[{"id":1,"size":1,"vmtype":"T1","replicas":[4]}]});
        assert!(matches!(
            CloudConfig::from_json(&dangling),
            Err(ConfigError::DanglingHost { .. })
        ));
        assert!(matches!(
            one_machine().new_mch(&n(2), &n(10), &n(5)),
            Err(ConfigError::NewMachineNotEmpty)
        ));
    }
}
