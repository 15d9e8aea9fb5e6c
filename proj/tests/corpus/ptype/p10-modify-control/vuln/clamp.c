static int clamp(int len, int cap, int limit)
{
    if (len > cap)
        return cap;
    return len;
}
