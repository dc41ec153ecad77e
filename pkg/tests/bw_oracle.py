"""Blocksworld semantics written out by hand, independent of the PDDL stack.

A state is (towers, held): towers is a frozenset of bottom-to-top tuples and
held is the block in the gripper or None.
"""

from collections import deque


def state_from_atoms(atoms):
    on = {}
    table = []
    held = None
    for atom in atoms:
        parts = atom.strip("()").split()
        if parts[0] == "on":
            on[parts[2]] = parts[1]  # below -> above
        elif parts[0] == "ontable":
            table.append(parts[1])
        elif parts[0] == "holding":
            held = parts[1]
    towers = []
    for base in table:
        tower = [base]
        while tower[-1] in on:
            tower.append(on[tower[-1]])
        towers.append(tuple(tower))
    return frozenset(towers), held


def goal_holds(state, goal_atoms):
    towers, held = state
    for atom in goal_atoms:
        parts = atom.strip("()").split()
        if parts[0] == "on":
            if not any(parts[2] in t and t.index(parts[2]) + 1 < len(t)
                       and t[t.index(parts[2]) + 1] == parts[1] for t in towers):
                return False
        elif parts[0] == "ontable":
            if not any(t[0] == parts[1] for t in towers):
                return False
        else:
            raise ValueError(atom)
    return True


def moves(state):
    towers, held = state
    if held is None:
        for t in towers:
            rest = towers - {t}
            shorter = rest | ({t[:-1]} if len(t) > 1 else set())
            yield frozenset(shorter), t[-1]
    else:
        yield towers | {(held,)}, None
        for t in towers:
            yield (towers - {t}) | {t + (held,)}, None


def shortest_plan_length(init_atoms, goal_atoms, limit=10**7):
    init_atoms, goal_atoms = list(init_atoms), list(goal_atoms)
    start = state_from_atoms(init_atoms)
    if goal_holds(start, goal_atoms):
        return 0
    seen = {start}
    frontier = deque([(start, 0)])
    while frontier:
        state, depth = frontier.popleft()
        for nxt in moves(state):
            if nxt in seen:
                continue
            if goal_holds(nxt, goal_atoms):
                return depth + 1
            seen.add(nxt)
            frontier.append((nxt, depth + 1))
            if len(seen) > limit:
                raise RuntimeError("oracle limit")
    return None
