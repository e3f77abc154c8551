#include "bindbench/catalog.hpp"

#include <algorithm>

namespace bindbench::catalog {
namespace {

bool contains(const std::vector<std::string>& items, std::string_view id) {
  return std::find(items.begin(), items.end(), id) != items.end();
}

}  // namespace

const std::vector<std::string>& description_shapes() {
  static const std::vector<std::string> shapes{"airplane", "triangle", "cloud",    "X-shape",  "umbrella",
                                               "pentagon", "heart",    "star",     "circle",   "square",
                                               "spade",    "scissors", "infinity", "check mark", "right-arrow"};
  return shapes;
}

const std::vector<std::string>& description_colors() {
  static const std::vector<std::string> colors{"red",  "magenta", "salmon", "green", "lime",
                                               "olive", "blue",   "teal",   "yellow", "purple",
                                               "brown", "gray",   "black",  "cyan",  "orange"};
  return colors;
}

const std::vector<std::string>& numerosity_shapes() {
  static const std::vector<std::string> shapes = [] {
    auto s = description_shapes();
    for (const char* extra : {"diamond", "hexagon", "ring", "crescent", "trapezoid"}) s.emplace_back(extra);
    return s;
  }();
  return shapes;
}

const std::vector<std::string>& numerosity_colors() {
  static const std::vector<std::string> colors = [] {
    auto c = description_colors();
    for (const char* extra : {"navy", "maroon", "pink", "khaki", "indigo"}) c.emplace_back(extra);
    return c;
  }();
  return colors;
}

const std::vector<std::string>& rmts_shapes() {
  static const std::vector<std::string> shapes{"triangle", "cloud", "X-shape", "heart",
                                               "circle",   "square", "star",   "pentagon"};
  return shapes;
}

const std::vector<std::string>& rmts_colors() {
  static const std::vector<std::string> colors{"red", "green", "blue", "darkorange", "purple", "gray", "teal", "brown"};
  return colors;
}

const std::vector<std::string>& all_shapes() {
  static const std::vector<std::string> shapes = [] {
    auto s = numerosity_shapes();
    s.emplace_back(kLetterL);
    s.emplace_back(kLetterT);
    return s;
  }();
  return shapes;
}

const std::vector<std::string>& all_colors() {
  static const std::vector<std::string> colors = [] {
    auto c = numerosity_colors();
    c.emplace_back("darkorange");
    return c;
  }();
  return colors;
}

bool is_shape(std::string_view id) { return contains(all_shapes(), canonical_shape(id)); }
bool is_color(std::string_view id) { return contains(all_colors(), id); }

std::string canonical_shape(std::string_view id) {
  if (id == "cross") return "X-shape";
  return std::string(id);
}

const std::vector<CountCategory>& t2i_count_categories() {
  static const std::vector<CountCategory> categories = [] {
    std::vector<CountCategory> out;
    for (const char* food :
         {"apples",      "bananas",   "oranges",     "lemons",      "limes",     "pears",     "peaches",
          "plums",       "cherries",  "strawberries", "blueberries", "grapes",    "kiwis",     "mangoes",
          "pineapples",  "coconuts",  "avocados",    "tomatoes",    "carrots",   "potatoes",  "onions",
          "peppers",     "cucumbers", "eggplants",   "pumpkins",    "mushrooms", "radishes",  "beets",
          "donuts",      "cupcakes",  "cookies",     "muffins",     "croissants", "bagels",   "pretzels",
          "waffles",     "pancakes",  "pies",        "eggs",        "sandwiches", "tacos",    "burritos",
          "hamburgers",  "hot dogs",  "pizzas",      "sushi rolls", "dumplings", "macarons",  "walnuts",
          "watermelons"}) {
      out.push_back({food, "food"});
    }
    for (const char* animal :
         {"cats",      "dogs",      "horses",   "cows",      "pigs",      "sheep",     "goats",
          "rabbits",   "chickens",  "ducks",    "geese",     "turkeys",   "owls",      "eagles",
          "parrots",   "penguins",  "flamingos", "swans",    "frogs",     "turtles",   "snakes",
          "lizards",   "fish",      "sharks",   "dolphins",  "whales",    "octopuses", "crabs",
          "lobsters",  "snails",    "butterflies", "bees",   "ladybugs",  "ants",      "spiders",
          "lions",     "tigers",    "bears",    "wolves",    "foxes",     "deer",      "elephants",
          "giraffes",  "zebras",    "monkeys",  "kangaroos", "koalas",    "pandas",    "camels",
          "squirrels"}) {
      out.push_back({animal, "animal"});
    }
    return out;
  }();
  return categories;
}

const std::vector<std::string>& t2i_scene_objects() {
  static const std::vector<std::string> objects{"cube",  "ball",   "cup",    "vase",    "book",   "hat",
                                                "chair", "candle", "bottle", "balloon", "box",    "lamp",
                                                "shoe",  "donut",  "clock",  "kite",    "pencil", "umbrella"};
  return objects;
}

const std::vector<std::string>& t2i_scene_colors() {
  static const std::vector<std::string> colors{"red",  "green", "blue",  "yellow", "purple", "orange",
                                               "gray", "black", "white", "pink",   "teal",   "brown"};
  return colors;
}

std::string pluralize(std::string_view noun) {
  std::string s(noun);
  auto ends_with = [&](std::string_view suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  if (ends_with("s") || ends_with("x") || ends_with("ch") || ends_with("sh")) return s + "es";
  if (ends_with("y") && s.size() >= 2 && std::string_view("aeiou").find(s[s.size() - 2]) == std::string_view::npos) {
    return s.substr(0, s.size() - 1) + "ies";
  }
  return s + "s";
}

}  // namespace bindbench::catalog
