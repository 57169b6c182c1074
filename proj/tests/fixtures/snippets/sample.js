function scale(value, factor) {
    const total = value * factor;
    return total;
}
