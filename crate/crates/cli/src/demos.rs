//! Example inputs shipped with the binary.

/// `(relative path, contents)` of every bundled file.
pub const FILES: &[(&str, &str)] = &[
    ("lambda/graph.json", include_str!("../demos/lambda/graph.json")),
    ("lambda/rule.json", include_str!("../demos/lambda/rule.json")),
    (
        "lambda/expected_D.json",
        include_str!("../demos/lambda/expected_D.json"),
    ),
    (
        "lambda/expected_H.json",
        include_str!("../demos/lambda/expected_H.json"),
    ),
    ("cloud/g1.json", include_str!("../demos/cloud/g1.json")),
    ("cloud/g2.json", include_str!("../demos/cloud/g2.json")),
    ("cloud/rules.json", include_str!("../demos/cloud/rules.json")),
    ("cloud/create_vm.json", include_str!("../demos/cloud/create_vm.json")),
    (
        "cloud/replicate_vm.json",
        include_str!("../demos/cloud/replicate_vm.json"),
    ),
    (
        "cloud/replicate_adm.json",
        include_str!("../demos/cloud/replicate_adm.json"),
    ),
    (
        "cloud/turn_on_machine.json",
        include_str!("../demos/cloud/turn_on_machine.json"),
    ),
    (
        "cloud/turn_off_machine.json",
        include_str!("../demos/cloud/turn_off_machine.json"),
    ),
];

pub fn get(path: &str) -> Option<&'static str> {
    FILES.iter().find(|(p, _)| *p == path).map(|(_, c)| *c)
}
