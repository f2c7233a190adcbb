#!/usr/bin/env python3
"""Regenerate the bundled line-per-step training corpus.

Emits a deterministic mix of single-appliance instruction steps (at least
260 per label so balanced sampling at 218 always succeeds), keyword-free
steps, and multi-appliance steps that the exactly-one-match rule must skip.

Run from classifier/:  python3 tools/make_corpus.py
"""

from pathlib import Path

import numpy as np

OUT = Path(__file__).parent.parent / "data" / "corpus.txt"

FOODS = [
    "the soup", "the leftovers", "a cup of milk", "the gravy", "a bowl of oats",
    "the rice", "the stew", "a mug of cocoa", "the mashed potatoes", "the curry",
    "the green beans", "a plate of noodles", "the chili", "the casserole dish",
    "a portion of lasagna", "the frozen peas", "the butter", "a cup of broth",
]
COLD_ITEMS = [
    "the juice", "the cream", "the yogurt", "the dough", "the salad", "the fish",
    "the chicken thighs", "the leftover pie", "the egg whites", "the marinade",
    "the berries", "the whipped topping", "the cheese block", "the batter",
    "the sparkling water", "the pudding", "the cut fruit", "the sauce",
]
WASH_ITEMS = [
    "the lettuce", "the berries", "the cutting board", "your hands", "the mixing bowl",
    "the measuring cups", "the herbs", "the potatoes", "the colander", "the whisk",
    "the grapes", "the carrots", "the strainer", "the sponge", "the baking tray",
    "the tomatoes", "the mushrooms", "the knife",
]
BAKE_ITEMS = [
    "the cookies", "the casserole", "the bread loaf", "the muffins", "the roast",
    "the vegetables", "the pizza", "the pie crust", "the salmon fillet", "the granola",
    "the potatoes", "the brownies", "the tart", "the drumsticks", "the squash halves",
    "the croutons", "the meatballs", "the biscuits",
]
BLEND_ITEMS = [
    "the smoothie mix", "the soup base", "the salsa", "the pesto", "the milkshake",
    "the hummus", "the pancake batter", "the fruit and ice", "the tomato sauce",
    "the spice paste", "the dressing", "the frozen bananas", "the oat flour",
    "the nut butter", "the puree", "the marinade", "the chutney", "the dip",
]
STORE_ITEMS = [
    "the spices", "the canned beans", "a clean plate", "the cereal box", "the mugs",
    "the baking sheet", "the flour jar", "the honey", "the pasta boxes", "the glasses",
    "the serving bowls", "the olive oil", "the paper towels", "the food wrap",
    "the teabags", "the sugar tin", "the snack bags", "the measuring spoons",
]
PREP_ITEMS = [
    "the dough", "the cooling rack", "the chopped onions", "the pie", "the roast",
    "the pastry sheet", "the marinated tofu", "the sliced bread", "the dirty pans",
    "the rolled tortillas", "the cake tin", "the skewers", "the seasoned ribs",
    "the trimmed beans", "the garnish", "the pressed garlic", "the zested lemon",
    "the folded napkins",
]
SHORT_TIMES = [
    "for 30 seconds", "for 45 seconds", "for 1 minute", "for 90 seconds",
    "for 2 minutes", "for 3 minutes", "in 10-second bursts", "for about a minute",
    "until steaming", "until heated through",
]
LONG_TIMES = [
    "for 10 minutes", "for 20 minutes", "for half an hour", "for 45 minutes",
    "for an hour", "overnight", "for two hours", "until set", "until chilled",
    "until firm",
]
OVEN_TIMES = [
    "for 12 minutes", "for 25 minutes", "for 40 minutes", "until golden brown",
    "until bubbling", "for about half an hour", "until a skewer comes out clean",
    "for 15 minutes per side", "until crisp", "until fragrant",
]
TEMPS = ["350 degrees", "375 degrees", "400 degrees", "425 degrees", "180 C", "200 C"]

TEMPLATES = {
    "microwave": [
        ("Microwave {a} on high {b}.", FOODS, SHORT_TIMES),
        ("Heat {a} in the microwave {b}.", FOODS, SHORT_TIMES),
        ("Cover {a} and microwave {b}, stirring halfway.", FOODS, SHORT_TIMES),
        ("Pop {a} into the microwave and run it {b}.", FOODS, SHORT_TIMES),
        ("Defrost {a} in the microwave {b} before cooking.", FOODS, SHORT_TIMES),
    ],
    "fridge": [
        ("Chill {a} in the fridge {b}.", COLD_ITEMS, LONG_TIMES),
        ("Take {a} out of the fridge and let it warm up.", COLD_ITEMS, None),
        ("Return {a} to the fridge {b}.", COLD_ITEMS, LONG_TIMES),
        ("Keep {a} in the fridge until serving.", COLD_ITEMS, None),
        ("Rest {a} in the fridge {b} to firm up.", COLD_ITEMS, LONG_TIMES),
    ],
    "sink": [
        ("Rinse {a} in the sink under cold water.", WASH_ITEMS, None),
        ("Wash {a} in the sink with warm soapy water.", WASH_ITEMS, None),
        ("Drain {a} into the sink carefully.", WASH_ITEMS, None),
        ("Scrub {a} over the sink before peeling.", WASH_ITEMS, None),
        ("Leave {a} to soak in the sink {b}.", WASH_ITEMS, SHORT_TIMES),
    ],
    "oven": [
        ("Bake {a} in the oven {b}.", BAKE_ITEMS, OVEN_TIMES),
        ("Preheat the oven to {a} before starting on {b}.", TEMPS, BAKE_ITEMS),
        ("Roast {a} in the oven {b}.", BAKE_ITEMS, OVEN_TIMES),
        ("Slide {a} into the hot oven and bake {b}.", BAKE_ITEMS, OVEN_TIMES),
        ("Finish {a} under the oven broiler {b}.", BAKE_ITEMS, SHORT_TIMES),
    ],
    "toaster": [
        ("Toast the bread in the toaster until golden.", None, None),
        ("Pop {a} into the toaster and toast {b}.", ["two slices", "the bagel halves", "the frozen waffles", "the crumpets", "the sourdough slices", "the english muffin", "the rye slices", "the pita halves", "the thick-cut slices", "the cinnamon bread", "the multigrain slices", "the brioche slices", "the leftover pancakes", "the hash brown patties", "the split rolls", "the gluten-free slices", "the seeded slices", "the potato bread"], SHORT_TIMES),
        ("Run the toaster twice for {a}.", ["extra-crisp slices", "a darker finish", "the thick bagels", "the frozen slices", "an even browning", "the stubborn waffles"], None),
        ("Let the toaster finish {a} while you plate up.", ["the first batch", "the second batch", "the last two slices", "the garlic bread", "the breakfast round", "the final waffle"], None),
    ],
    "blender": [
        ("Blend {a} in the blender until smooth.", BLEND_ITEMS, None),
        ("Pulse {a} in the blender {b}.", BLEND_ITEMS, ["a few times", "five times", "until chunky", "until just combined", "in short bursts", "until creamy"]),
        ("Pour {a} into the blender and puree {b}.", BLEND_ITEMS, SHORT_TIMES),
        ("Scrape down the blender and blend {a} again.", BLEND_ITEMS, None),
    ],
    "cabinet": [
        ("Take {a} from the cabinet.", STORE_ITEMS, None),
        ("Store {a} back in the cabinet.", STORE_ITEMS, None),
        ("Grab {a} from the top cabinet shelf.", STORE_ITEMS, None),
        ("Stack {a} neatly inside the cabinet.", STORE_ITEMS, None),
    ],
    "coffee maker": [
        ("Brew {a} in the coffee maker.", ["a fresh pot", "a half pot", "a full carafe", "the morning batch", "a strong pot", "two cups", "the decaf pot", "a quick cup", "an extra pot", "the afternoon round"], None),
        ("Fill the coffee maker with {a} of water.", ["four cups", "six cups", "eight cups", "half a carafe", "a full carafe", "two mugs' worth", "ten ounces", "a liter", "the marked amount", "just enough"], None),
        ("Start the coffee machine and wait for {a}.", ["the drip to finish", "the beep", "the carafe to fill", "the brew cycle", "the light to turn green", "the steam to settle", "the first cup", "the gurgle to stop", "the warm plate to kick in", "the timer"], None),
        ("Rinse the coffee maker basket and add {a}.", ["two scoops", "three scoops", "a fresh filter", "the ground beans", "a level scoop", "the decaf blend", "the espresso grind", "a paper filter", "the house blend", "four tablespoons"], None),
        ("Descale the coffee machine {a}.", ["once a month", "with vinegar", "before first use", "after heavy use", "every few weeks", "when the light blinks", "with the cleaning tablet", "per the manual", "after hard-water cycles", "twice a season"], None),
    ],
    "countertop": [
        ("Set {a} on the countertop to rest.", PREP_ITEMS, None),
        ("Knead {a} on the floured countertop {b}.", ["the dough", "the bread dough", "the pizza base", "the pasta dough", "the pastry", "the roll mixture"], SHORT_TIMES),
        ("Wipe the countertop before laying out {a}.", PREP_ITEMS, None),
        ("Spread {a} across the countertop to cool.", PREP_ITEMS, None),
    ],
}

NO_MATCH = [
    ("Stir {a} well with a wooden spoon.", FOODS),
    ("Season {a} with salt and pepper.", FOODS),
    ("Slice {a} into thin strips.", WASH_ITEMS),
    ("Whisk {a} until fluffy.", BLEND_ITEMS),
    ("Let {a} rest under a clean towel.", PREP_ITEMS),
]

MULTI_MATCH = [
    "Move the tray from the oven to the countertop.",
    "Rinse the carafe in the sink and refit the coffee maker.",
    "Take the dough from the fridge and microwave it briefly.",
    "Carry the plates from the cabinet to the countertop.",
    "Shift the pie from the fridge into the oven.",
    "Empty the blender into the sink and rinse well.",
]


PREFIXES = ["", "Next, ", "Then ", "Meanwhile, ", "When ready, ", "After that, ", "Finally, ", "First, "]


def _with_prefix(prefix: str, line: str) -> str:
    if not prefix:
        return line
    return prefix + line[0].lower() + line[1:]


def expand(label_templates):
    base = []
    for template, slot_a, slot_b in label_templates:
        if slot_a is None:
            base.append(template)
        elif slot_b is None:
            base.extend(template.format(a=a) for a in slot_a)
        else:
            base.extend(template.format(a=a, b=b) for a in slot_a for b in slot_b)
    return [_with_prefix(p, line) for line in base for p in PREFIXES]


def main() -> None:
    rng = np.random.Generator(np.random.Philox(777))
    lines: list[str] = []
    for label, templates in TEMPLATES.items():
        candidates = sorted(set(expand(templates)))
        if len(candidates) < 260:
            raise SystemExit(f"only {len(candidates)} distinct lines for {label}")
        picked = rng.choice(len(candidates), size=260, replace=False)
        lines.extend(candidates[i] for i in picked)
    for template, slot in NO_MATCH:
        lines.extend(template.format(a=a) for a in slot)
    lines.extend(MULTI_MATCH)
    order = rng.permutation(len(lines))
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text("".join(lines[i] + "\n" for i in order))
    print(f"wrote {len(lines)} lines to {OUT}")


if __name__ == "__main__":
    main()
