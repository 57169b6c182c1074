package main

func scale(value int, factor int) int {
    total := value * factor
    return total
}
