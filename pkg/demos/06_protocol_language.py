"""Scripting experiments in the protocol language.

Protocols are short line-oriented text: declarations set the stage, steps
drive the membranes.  This demo builds a fresh two-gas experiment, runs
it, renders the canonical form back out, and shows the machine-readable
records emitted by the command line.
"""

from qgas import execute, parse, render
from qgas.cli import CliConfig, parse_records, run_command

SOURCE = """
# a 3-gas chamber separated along its aggregate eigenbasis
space lab dim 2
temp 1.0
ket z+ = [1, 0]
ket z- = [0, 1]
ket x+ = [1, 1]
gas up from ket z+
gas down from ket z-
gas side from ket x+
chamber cell volume 2.0
fill cell { up : 0.25, down : 0.25, side : 0.5 } moles 1.0
checkpoint start
separate cell by eigenbasis into heavy light
"""

ast = parse(SOURCE)
print("canonical rendering:")
print(render(ast))

result = execute(ast)
for event in result.ledger.events:
    print(f"step {event.step_index}: {event.kind}"
          f" Q={event.heat_absorbed_by_gas:+.6f}")
for name, chamber in result.final_state.chambers.items():
    print(f"  {name}: V={chamber.volume:.6f} n={chamber.moles:.6f}")

print()
print("the same engine powers the CLI; records mode is line-delimited:")
code, out, _ = run_command(CliConfig("demo", "peres-tatiana", format="records"))
print(out)
assert code == 0

print("records parse back losslessly:")
for record in parse_records(out)[-2:]:
    print(" ", record)
