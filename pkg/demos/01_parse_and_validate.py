"""Parse a traditional jig, inspect its bar arithmetic, then break it.

Runs offline; prints what the notation layer sees at every step.
"""

from fractions import Fraction

from tunesmith import bar_fill, parse_tune, serialize, validate

JIG = """\
X:1
T:An Irish Lively Jig
M:6/8
L:1/8
K:Ddor
|:A|dAF DAF|GAG Aag|dAF DAF|Ffe e2a|dAF DAF|GAG Aag|faf dBA|Bdf d2:|
"""


def main() -> None:
    tune = parse_tune(JIG)
    header = tune.header
    print(f"title       : {header.title}")
    print(f"meter       : {header.meter.to_abc()}  (= {header.meter.value})")
    print(f"unit length : {tune.effective_unit_length}")
    print(f"key         : {header.key.to_abc()}")
    print(f"bars        : {len(tune.body)}")
    print()

    unit = tune.effective_unit_length
    for index, bar in enumerate(tune.body):
        fill = bar_fill(bar, unit)
        marker = "pickup" if fill < header.meter.value and index == 0 else ""
        print(f"  bar {index}: {len(bar.events)} events, fill {fill} {marker}")
    print()

    issues = validate(tune)
    print(f"validation  : {issues or 'clean'}")
    print("(the 1/8 pickup plus the 5/8 final bar complement the 6/8 meter)")
    print()

    # Chop the last full beat off the final bar and watch the checker object.
    broken = parse_tune(JIG.replace("Bdf d2:|", "d2:|"))
    for issue in validate(broken):
        print(f"after truncation -> {issue.severity.value}: "
              f"{issue.code.value} (bar {issue.bar_index}): {issue.detail}")
    print()

    print("serialized form round-trips structurally:")
    print(serialize(tune))
    assert parse_tune(serialize(tune)) == tune


if __name__ == "__main__":
    main()
