static int scale(int v, int f)
{
    return v * 2;
}
