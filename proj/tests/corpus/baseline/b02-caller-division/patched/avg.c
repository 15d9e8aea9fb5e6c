static long per_item(long total, int count)
{
    return total / count;
}

long report_average(long total, int count)
{
    long avg;
    if (count == 0) {
        return 0;
    }
    avg = per_item(total, count);
    return avg;
}
