namespace aq {}
